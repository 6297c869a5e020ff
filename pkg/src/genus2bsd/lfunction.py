"""Degree-4 L-series: Dirichlet coefficients, central values and
derivatives, functional-equation residuals, quadratic twists.

The completed function is Lambda(s) = A^s Gamma(s)^2 L(s) with
A = sqrt(Q) / (2 pi)^2 and conductor Q = (N D^2)^2 for the twist by D
(D = 1 untwisted).  The sign is +1: both conjugate forms carry the same
rational sign, and twisting by a negative discriminant split at every
bad prime flips both.  Values come from a smoothed approximate
functional equation whose weight kernels are incomplete Mellin
transforms of 2 K_0(2 sqrt x); the order-0 kernel is z K_1(z) in the
variable z = 2 sqrt(x), the log-weighted kernels are tabulated once by
cumulative quadrature and reused through cubic splines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline
from scipy.special import k0 as bessel_k0
from scipy.special import k1 as bessel_k1

from .curve import CurveModel, count_points_fast, euler_factor
from .numbers import kronecker

TWO_PI_SQ = (2.0 * math.pi) ** 2
_ZMAX = 80.0


class MissingBadFactor(Exception):
    """A bad prime <= M has no resolved local factor."""


class InsufficientCoefficients(Exception):
    """The coefficient cache is too short for the requested precision."""


@dataclass
class LSeries:
    """Coefficients a_n (n <= M) and functional-equation data."""

    a: np.ndarray
    sqrt_conductor: int
    label: str = ""
    sign: int = 1

    @property
    def m_cached(self):
        return len(self.a) - 1

    @property
    def scale(self):
        """A = sqrt(Q) / (2 pi)^2."""
        return self.sqrt_conductor / TWO_PI_SQ


@dataclass
class LValue:
    order_tested: int
    value: float
    error_estimate: float


# ----------------------------------------------------------------------
# Coefficients
# ----------------------------------------------------------------------

def _spf_sieve(m):
    spf = np.zeros(m + 1, dtype=np.int64)
    for p in range(2, m + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def coefficients(model: CurveModel, M: int, bad_factors: dict,
                 level: int | None = None, twist_D: int = 1,
                 label: str = "") -> LSeries:
    """a_n for n <= M of L(A, s) (or of the twist by fundamental D).

    bad_factors maps each prime p | level to the local P_p(T) coefficient
    tuple of the untwisted surface.  At p | twist_D the twisted factor is
    1; at p | level it is unchanged (all our twists split at bad primes);
    at good p the trace flips by kronecker(D, p).
    """
    N = level or model.level
    a = np.zeros(M + 1, dtype=np.int64)
    a[1] = 1
    spf = _spf_sieve(M)
    ppowers = {}
    p = 2
    while p <= M:
        if spf[p] == p:
            chi = kronecker(twist_D, p) if twist_D != 1 else 1
            if twist_D % p == 0:
                block = [1] + [0] * _kmax(p, M)
            elif N % p == 0:
                if p not in bad_factors:
                    raise MissingBadFactor(f"no local factor at {p}")
                c = _twist_poly(tuple(bad_factors[p]), chi)
                block = _dirichlet_block(c, _kmax(p, M))
            else:
                kmax = _kmax(p, M)
                e1 = chi * _e1(model, p)
                if kmax == 1:
                    block = [1, e1]
                else:
                    e2 = euler_factor(model, p).e2
                    block = _dirichlet_block(
                        (1, -e1, e2, -p * e1, p * p), kmax)
            ppowers[p] = block
        p += 1
    for n in range(2, M + 1):
        p = int(spf[n])
        q, k = p, 1
        m = n // p
        while m % p == 0:
            m //= p
            q *= p
            k += 1
        a[n] = ppowers[p][k] * a[m]
    return LSeries(a=a, sqrt_conductor=N * twist_D * twist_D, label=label)


def _kmax(p, M):
    k = 1
    while p ** (k + 1) <= M:
        k += 1
    return k


def _e1(model, p):
    return p + 1 - count_points_fast(model, p, ext=1)


def _twist_poly(c, chi):
    # P(T) -> P(chi * T) for chi = +-1
    return tuple(ci * chi ** i for i, ci in enumerate(c))


def _dirichlet_block(c, kmax):
    a = [1] + [0] * kmax
    for k in range(1, kmax + 1):
        s = 0
        for j in range(1, min(k, len(c) - 1) + 1):
            s -= c[j] * a[k - j]
        a[k] = s
    return a


# ----------------------------------------------------------------------
# Weight kernels.  In z = 2 sqrt(x):
#   J0(z) = int_z^inf  t K0(t) dt               = z K1(z)   (closed form)
#   J1(z) = int_z^inf 2 t K0(t) log(t/2) dt
#   J2(z) = int_z^inf 4 t K0(t) log(t/2)^2 dt
# and for off-centre s = 1 + t:
#   Js(z; s) = 2^(2-2s) int_z^inf  u^(2s-1) K0(u) du,   Js(0) = Gamma(s)^2
# ----------------------------------------------------------------------

def _zgrid():
    lo = np.geomspace(1e-9, 0.25, 6000, endpoint=False)
    hi = np.linspace(0.25, _ZMAX, 400000)
    return np.concatenate(([0.0], lo, hi))


def _tail_spline(weights_fn):
    z = _zgrid()
    w = np.zeros_like(z)
    w[1:] = weights_fn(z[1:])
    cum = cumulative_trapezoid(w, z, initial=0.0)
    tail = cum[-1] - cum
    return CubicSpline(z, tail, extrapolate=False)


@lru_cache(maxsize=None)
def _j1_spline():
    return _tail_spline(lambda z: 2.0 * z * bessel_k0(z) * np.log(z / 2.0))


@lru_cache(maxsize=None)
def _j2_spline():
    return _tail_spline(lambda z: 4.0 * z * bessel_k0(z) * np.log(z / 2.0) ** 2)


@lru_cache(maxsize=None)
def _js_spline(s: float):
    c = 2.0 ** (2.0 - 2.0 * s)
    return _tail_spline(lambda z: c * z ** (2.0 * s - 1.0) * bessel_k0(z))


def _j0(z):
    out = np.ones_like(z)
    nz = z > 0
    out[nz] = z[nz] * bessel_k1(z[nz])
    return out


def _eval_spline(sp, z):
    out = np.zeros_like(z)
    inside = z < _ZMAX
    out[inside] = sp(z[inside])
    return out


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------

def required_m(sqrt_conductor: int, eps: float, theta: float = 1.0) -> int:
    """Smallest coefficient count for truncation error ~ eps."""
    zcut = -math.log(eps) + 12.0
    A = sqrt_conductor / TWO_PI_SQ
    return int(A * (zcut / 2.0) ** 2 * max(theta, 1.0 / theta)) + 2


def evaluate(ls: LSeries, derivative_order: int, eps: float = 1e-9,
             theta: float = 1.0) -> LValue:
    """L^(k)(A, 1) for k in {0, 1, 2} by the smoothed AFE.

    For curves of analytic rank r > k the value is below the error bound.
    The reported error combines the series tail with a fixed quadrature
    allowance for the spline kernels.
    """
    if derivative_order not in (0, 1, 2):
        raise ValueError("derivative order must be 0, 1 or 2")
    need = required_m(ls.sqrt_conductor, eps, theta)
    if ls.m_cached < need:
        raise InsufficientCoefficients(
            f"need M >= {need}, cached {ls.m_cached}")
    lam = _lambda_derivatives(ls, derivative_order, theta)
    val, err = _to_l_scale(ls, lam, derivative_order)
    return LValue(order_tested=derivative_order, value=val,
                  error_estimate=err + eps * max(1.0, abs(val)))


def _lambda_derivatives(ls: LSeries, kmax: int, theta: float):
    """(Lambda(1), Lambda'(1), ..., up to kmax) at s = 1."""
    A = ls.scale
    n = np.arange(1, ls.m_cached + 1, dtype=np.float64)
    an = ls.a[1:].astype(np.float64)
    u = 2.0 * np.sqrt(n * theta / A)
    v = 2.0 * np.sqrt(n / (theta * A))
    pre = an * (A / n)
    logs = np.log(A / n)
    w = float(ls.sign)
    j0u, j0v = _j0(u), _j0(v)
    out = [float(np.sum(pre * (j0u + w * j0v)))]
    if kmax >= 1:
        j1u = _eval_spline(_j1_spline(), u)
        j1v = _eval_spline(_j1_spline(), v)
        out.append(float(np.sum(pre * ((logs * j0u + j1u)
                                       - w * (logs * j0v + j1v)))))
    if kmax >= 2:
        j2u = _eval_spline(_j2_spline(), u)
        j2v = _eval_spline(_j2_spline(), v)
        t2u = logs * logs * j0u + 2.0 * logs * j1u + j2u
        t2v = logs * logs * j0v + 2.0 * logs * j1v + j2v
        out.append(float(np.sum(pre * (t2u + w * t2v))))
    return out


_EULER_GAMMA = 0.5772156649015328606
_PSI1_AT_1 = math.pi ** 2 / 6.0


def _to_l_scale(ls: LSeries, lam: list, k: int):
    """Convert Lambda-derivatives at 1 into L^(k)(1).

    Uses u(s) = A^s Gamma(s)^2, L = Lambda / u, and the exact derivatives
    of u at s = 1.  Lower-order L-derivatives feed the higher ones.
    """
    A = ls.scale
    la = math.log(A)
    u0 = A
    u1 = A * (la - 2.0 * _EULER_GAMMA)
    u2 = A * ((la - 2.0 * _EULER_GAMMA) ** 2 + 2.0 * _PSI1_AT_1)
    l0 = lam[0] / u0
    if k == 0:
        return l0, 1e-12 * abs(lam[0]) / u0 + 1e-15
    l1 = (lam[1] - l0 * u1) / u0
    if k == 1:
        return l1, 1e-11 * (abs(lam[1]) + abs(l0 * u1)) / u0 + 1e-15
    l2 = (lam[2] - 2.0 * l1 * u1 - l0 * u2) / u0
    return l2, 1e-10 * (abs(lam[2]) + abs(l0 * u2) + abs(l1 * u1)) / u0 + 1e-14


def lambda_value(ls: LSeries, t: float, theta: float = 1.0) -> float:
    """Lambda(1 + t) by the folded series with balance parameter theta."""
    A = ls.scale
    n = np.arange(1, ls.m_cached + 1, dtype=np.float64)
    an = ls.a[1:].astype(np.float64)
    u = 2.0 * np.sqrt(n * theta / A)
    v = 2.0 * np.sqrt(n / (theta * A))
    su = _eval_spline(_js_spline(1.0 + t), u)
    sv = _eval_spline(_js_spline(1.0 - t), v)
    plus = np.sum(an * (A / n) ** (1.0 + t) * su)
    minus = np.sum(an * (A / n) ** (1.0 - t) * sv)
    return float(plus + ls.sign * minus)


def functional_equation_residual(ls: LSeries, theta: float = 1.25) -> float:
    """max_t |Lambda(1+t) - w Lambda(1-t)| / |Lambda(1+t)|, t in 0.1..0.5.

    Both sides are folded with the same asymmetric theta, so the identity
    is not built in: it fails when coefficients, conductor, sign or bad
    factors are wrong.
    """
    worst = 0.0
    for t in (0.1, 0.2, 0.3, 0.4, 0.5):
        lhs = lambda_value(ls, t, theta)
        rhs = ls.sign * lambda_value(ls, -t, theta)
        denom = max(abs(lhs), 1e-300)
        worst = max(worst, abs(lhs - rhs) / denom)
    return worst


def analytic_rank(ls: LSeries, threshold: float = 1e-3,
                  eps: float = 1e-9):
    """Smallest k <= 2 with |L^(k)(1)| above threshold * natural scale."""
    scale = None
    for k in (0, 1, 2):
        lv = evaluate(ls, k, eps=eps)
        mag = abs(lv.value)
        if scale is None and mag > 10.0 * lv.error_estimate:
            scale = mag
        if mag > threshold * (scale if scale else 1.0) \
                and mag > 10.0 * lv.error_estimate:
            return k
    return ">=3 unsupported"
