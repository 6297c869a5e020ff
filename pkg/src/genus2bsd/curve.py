"""Genus-2 curve models over Q: reduction mod p, quadratic twisting,
point counting over F_p and F_{p^2}, and degree-4 Euler factors.

Models are y^2 + h(x) y = f(x) with integer coefficients, deg h <= 3 and
deg f <= 6.  The completed square g = h^2 + 4f (degree 5 or 6) drives
everything at odd primes; characteristic 2 is handled on the original
model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy

from .numbers import GF, GF2, kronecker, prime_factors

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


class BadReduction(Exception):
    """Reduction mod p is singular; callers must use the bad-factor path."""


class IntegralityViolation(Exception):
    """A quantity that must be an integer is not (signals a counting bug)."""


# ----------------------------------------------------------------------
# Polynomial helpers (dense tuples, low degree first)
# ----------------------------------------------------------------------

def poly_trim(c):
    c = tuple(c)
    while c and c[-1] == 0:
        c = c[:-1]
    return c


def poly_deg(c):
    c = poly_trim(c)
    return len(c) - 1 if c else -1


def poly_eval_int(c, x):
    v = 0
    for a in reversed(c):
        v = v * x + a
    return v


def poly_add_int(a, b):
    n = max(len(a), len(b))
    return poly_trim(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                           for i in range(n)))


def poly_mul_int(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return poly_trim(out)


def polyval(fld, coeffs, x):
    """Evaluate an integer-coefficient polynomial at a field element."""
    v = fld.zero()
    for a in reversed(coeffs):
        v = fld.add(fld.mul(v, x), fld.from_int(a))
    return v


# ----------------------------------------------------------------------
# Curve models
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CurveModel:
    """Integral model y^2 + h(x) y = f(x) of a genus-2 curve over Q."""

    f: tuple
    h: tuple
    label: str = ""
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "f", poly_trim(self.f))
        object.__setattr__(self, "h", poly_trim(self.h))
        if poly_deg(self.f) > 6 or poly_deg(self.h) > 3:
            raise ValueError("degree bounds: deg f <= 6, deg h <= 3")
        if self.discriminant() == 0:
            raise ValueError("singular model")

    def g(self):
        """Completed square h^2 + 4f, the sextic of y^2 = g(x)."""
        return poly_add_int(poly_mul_int(self.h, self.h),
                            tuple(4 * a for a in self.f))

    def discriminant(self):
        return _sextic_disc(self.g())

    def bad_primes(self):
        """Primes of singular reduction (exact, including p = 2)."""
        g = self.g()
        lead = g[-1] if g else 0
        cand = set(prime_factors(abs(lead))) | set(prime_factors(abs(self.discriminant())))
        cand.add(2)
        return sorted(p for p in cand if not self.has_good_reduction(p))

    def has_good_reduction(self, p):
        if p == 2:
            return _smooth_mod_2(self.f, self.h)
        g = [a % p for a in self.g()]
        while g and g[-1] == 0:
            g.pop()
        if len(g) < 6:  # degree <= 4: multiple point at infinity
            return False
        x = sympy.Symbol("x")
        gp = sympy.Poly(list(reversed(g)), x, modulus=p)
        return gp.degree() >= 5 and sympy.gcd(gp, gp.diff(x)).degree() == 0

    def reduce_mod_p(self, p):
        if not self.has_good_reduction(p):
            raise BadReduction(f"{self.label or self.f}: bad reduction at {p}")
        return ReducedCurve(field=GF(p),
                            f=tuple(a % p for a in self.f),
                            h=tuple(a % p for a in self.h))

    def quadratic_twist(self, D):
        """Integral model of the twist by Q(sqrt(D)) (completed square D*g).

        For D = 1 mod 4 the twist keeps the original h, so reduction at 2
        stays as good as the twist allows: y^2 + h y = f + ((D-1)/4) g.
        """
        if D == 1:
            return self
        g = self.g()
        label = f"{self.label}.twist{D}" if self.label else ""
        if D % 4 == 1:
            k = (D - 1) // 4
            f2 = poly_add_int(self.f, tuple(k * a for a in g))
            return CurveModel(f=f2, h=self.h, label=label,
                              level=self.level * D * D)
        return CurveModel(f=tuple(D * a for a in g), h=(),
                          label=label, level=self.level * D * D)


@dataclass(frozen=True)
class ReducedCurve:
    """A good-reduction fibre of a model over a finite field."""

    field: object
    f: tuple
    h: tuple


# ----------------------------------------------------------------------
# Smoothness at 2: search both affine charts over F_16 and F_64, which
# contain every possible singular point (x has degree <= 3 over F_2 from
# h(x) = 0, y is at worst quadratic over F_2(x)).
# ----------------------------------------------------------------------

_GF2K_MOD = {1: 0b10, 2: 0b111, 3: 0b1011, 4: 0b10011, 6: 0b1000011}


def _gf2k_mul(a, b, k):
    mod = _GF2K_MOD[k]
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> k:
            a ^= mod
    return r


def _gf2k_eval(coeffs, x, k):
    v = 0
    for c in reversed(coeffs):
        v = _gf2k_mul(v, x, k) ^ (c & 1)
    return v


def _chart_smooth_2(f, h, k):
    """No singular affine point of y^2 + hy + f = 0 over F_{2^k}."""
    fd = tuple(i * c for i, c in enumerate(f))[1:] or (0,)
    hd = tuple(i * c for i, c in enumerate(h))[1:] or (0,)
    for x in range(1 << k):
        if _gf2k_eval(h, x, k):
            continue  # dP/dy = h(x) != 0 in char 2
        fx = _gf2k_eval(f, x, k)
        fdx = _gf2k_eval(fd, x, k)
        hdx = _gf2k_eval(hd, x, k)
        for y in range(1 << k):
            if _gf2k_mul(y, y, k) ^ fx:
                continue  # not on curve (h(x) = 0 here)
            if _gf2k_mul(hdx, y, k) ^ fdx == 0:
                return False
    return True


def _smooth_mod_2(f, h):
    # chart at infinity: u = 1/x, v = y/x^3
    f6 = tuple((f[i] if i < len(f) else 0) for i in range(7))
    h3 = tuple((h[i] if i < len(h) else 0) for i in range(4))
    finf = tuple(reversed(f6))
    hinf = tuple(reversed(h3))
    for k in (4, 6):
        if not _chart_smooth_2(f, h, k) or not _chart_smooth_2(finf, hinf, k):
            return False
    return True


# ----------------------------------------------------------------------
# Discriminant of the associated binary sextic
# ----------------------------------------------------------------------

def _sextic_disc(g):
    d = poly_deg(g)
    if d < 5:
        return 0
    x = sympy.Symbol("x")
    disc = int(sympy.discriminant(sympy.Poly(list(reversed(g)), x)))
    if d == 5:  # simple root at infinity of the binary form
        disc *= g[-1] ** 2
    return disc


# ----------------------------------------------------------------------
# Point counting
# ----------------------------------------------------------------------

def _quad_roots(fld, c, d):
    """#{y : y^2 + c y = d} over the field."""
    if fld.char == 2:
        return sum(1 for y in fld.elements()
                   if fld.is_zero(fld.sub(fld.add(fld.mul(y, y), fld.mul(c, y)), d)))
    disc = fld.add(fld.mul(c, c), fld.mul(fld.from_int(4), d))
    if fld.is_zero(disc):
        return 1
    return 2 if fld.sqrt(disc) is not None else 0


def count_points(curve: ReducedCurve) -> int:
    """#X(F_q) on the smooth projective model."""
    fld, f, h = curve.field, curve.f, curve.h
    n = 0
    for x in fld.elements():
        n += _quad_roots(fld, polyval(fld, h, x), polyval(fld, f, x))
    # points at infinity: y^2 + h3 y = f6 in the weighted closure
    h3 = h[3] if len(h) > 3 else 0
    f6 = f[6] if len(f) > 6 else 0
    c, d = fld.from_int(h3), fld.from_int(f6)
    if fld.is_zero(c) and fld.is_zero(d):
        n += 1
    else:
        n += _quad_roots(fld, c, d)
    return n


@njit(cache=True)
def _count_fp(g, p):  # pragma: no cover - numba
    sq = np.zeros(p, dtype=np.uint8)
    for y in range(p):
        sq[(y * y) % p] = 1
    n = 0
    for x in range(p):
        v = 0
        for i in range(6, -1, -1):
            v = (v * x + g[i]) % p
        if v == 0:
            n += 1
        elif sq[v]:
            n += 2
    if g[6] % p == 0:
        n += 1
    else:
        n += 2 if sq[g[6] % p] else 0
    return n


@njit(cache=True)
def _count_fp2(g, p, nr):  # pragma: no cover - numba
    sq = np.zeros(p, dtype=np.uint8)
    for y in range(p):
        sq[(y * y) % p] = 1
    n = 0
    for a in range(p):
        for b in range(p):
            v0, v1 = 0, 0
            for i in range(6, -1, -1):
                w0 = (v0 * a + nr * v1 * b + g[i]) % p
                w1 = (v0 * b + v1 * a) % p
                v0, v1 = w0, w1
            if v0 == 0 and v1 == 0:
                n += 1
            else:
                nrm = (v0 * v0 - nr * v1 * v1) % p
                if nrm == 0 or sq[nrm]:
                    n += 2
    # every element of F_p is a square in F_{p^2}
    n += 1 if g[6] % p == 0 else 2
    return n


def _g_mod_p(model, p):
    g = model.g()
    return np.array([(g[i] if i < len(g) else 0) % p for i in range(7)],
                    dtype=np.int64)


def count_points_fast(model: CurveModel, p: int, ext: int = 1) -> int:
    """#X(F_{p^ext}) for ext in {1, 2}; numba path at odd p."""
    if p == 2 or not _HAVE_NUMBA:
        fld = (GF(p) if ext == 1 else GF2(p))
        return count_points(ReducedCurve(field=fld,
                                         f=tuple(a % p for a in model.f),
                                         h=tuple(a % p for a in model.h)))
    g = _g_mod_p(model, p)
    if ext == 1:
        return int(_count_fp(g, p))
    nr = 2
    while pow(nr, (p - 1) // 2, p) == 1:
        nr += 1
    return int(_count_fp2(g, p, nr))


# ----------------------------------------------------------------------
# Euler factors
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EulerFactor:
    """Local factor of the degree-4 L-series at p, as P(T) coefficients."""

    p: int
    coeffs: tuple
    good: bool
    e1: int = 0
    e2: int = 0

    def __post_init__(self):
        if self.good:
            p, e1, e2 = self.p, self.e1, self.e2
            if e1 * e1 > 16 * p or abs(e2) > 6 * p:
                raise IntegralityViolation(f"Weil bound violated at {p}")
            object.__setattr__(self, "coeffs",
                               (1, -e1, e2, -p * e1, p * p))

    def value_at_1(self) -> int:
        """P(1); for good p this is #Jac(F_p)."""
        return sum(self.coeffs)

    def dirichlet_block(self, kmax):
        """Coefficients of 1/P(T) = sum a_{p^k} T^k up to k = kmax."""
        a = [1] + [0] * kmax
        c = self.coeffs
        for k in range(1, kmax + 1):
            s = 0
            for j in range(1, min(k, len(c) - 1) + 1):
                s -= c[j] * a[k - j]
            a[k] = s
        return a


def euler_factor(model: CurveModel, p: int) -> EulerFactor:
    """Degree-4 good factor 1 - e1 T + e2 T^2 - p e1 T^3 + p^2 T^4."""
    if not model.has_good_reduction(p):
        raise BadReduction(f"bad reduction at {p}")
    n1 = count_points_fast(model, p, ext=1)
    n2 = count_points_fast(model, p, ext=2)
    e1 = p + 1 - n1
    s2 = p * p + 1 - n2
    if (e1 * e1 - s2) % 2:
        raise IntegralityViolation(f"e2 non-integral at {p}")
    e2 = (e1 * e1 - s2) // 2
    return EulerFactor(p=p, coeffs=(), good=True, e1=e1, e2=e2)


def euler_e1(model: CurveModel, p: int) -> int:
    """Trace coefficient e1 = p + 1 - #X(F_p) at good p (fast path)."""
    return p + 1 - count_points_fast(model, p, ext=1)


def bad_euler_factor_candidates(model: CurveModel, p: int):
    """All products of two per-form local factors from {1, 1-T, 1+T}."""
    if model.level and model.level % p:
        raise ValueError(f"{p} is not a bad prime of the level")
    base = [(1,), (1, -1), (1, 1)]
    return [poly_mul_int(u, v) for u in base for v in base]


# ----------------------------------------------------------------------
# Tamagawa numbers at odd primes.
#
# At an odd prime of semistable bad reduction the special fibre of the
# minimal regular model is read off the reduced sextic: each rational
# double root is a node whose thickness equals v_p(disc Q) for the
# Hensel-lifted quadratic factor Q, and the component group of the
# Neron model is the cokernel of the weighted cycle Gram matrix of the
# dual graph.  Frobenius acts through node splitness (Legendre symbol of
# the cofactor at the node) and, in the totally degenerate case, through
# the two-component swap (Legendre symbol of the leading unit).
#
# A model whose sextic is p times a separable polynomial is the chart of
# a ramified quadratic twist of good reduction; there the component
# group is the 2-torsion of the Jacobian with its Frobenius action,
# counted from the factorization type of the separable part.
# ----------------------------------------------------------------------

class UnsupportedReduction(Exception):
    """Local reduction shape outside the implemented classification."""


def _pp_trim(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _pp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _pp_trim(out, p)


def _pp_divmod(a, b, p):
    a = _pp_trim(a, p)
    b = _pp_trim(b, p)
    assert b
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and _pp_trim(r, p):
        r = _pp_trim(r, p)
        if len(r) < len(b):
            break
        c = r[-1] * inv % p
        d = len(r) - len(b)
        q[d] = c
        for i, bi in enumerate(b):
            r[i + d] = (r[i + d] - c * bi) % p
        r.pop()
    return _pp_trim(q, p), _pp_trim(r, p)


def _pp_xgcd(a, b, p):
    """(g, s, t) with s a + t b = g (monic gcd) over F_p."""
    r0, r1 = _pp_trim(a, p), _pp_trim(b, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _pp_divmod(r0, r1, p)
        r0, r1 = r1, r
        qs = _pp_mul(q, s1, p)
        qt = _pp_mul(q, t1, p)
        s0, s1 = s1, _pp_trim([(x - y) % p for x, y in
                               zip(s0 + [0] * len(qs), qs + [0] * len(s0))], p)
        t0, t1 = t1, _pp_trim([(x - y) % p for x, y in
                               zip(t0 + [0] * len(qt), qt + [0] * len(t0))], p)
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in r0], [c * inv % p for c in s0],
            [c * inv % p for c in t0])


def _hensel_quadratic(g, rbar, p, K):
    """Monic quadratic factor of g over Z/p^K congruent to (x-rbar)^2."""
    A = [rbar * rbar % p, (-2 * rbar) % p, 1]
    B, rem = _pp_divmod(g, A, p)
    assert not rem, "double root expected"
    gcd, S, T = _pp_xgcd(A, B, p)
    assert gcd == [1], "node factor not coprime to cofactor"
    # S A + T B = 1 (mod p); lift A, B through powers of p
    A = list(A)
    B = list(B)
    pm = p
    for m in range(1, K):
        mod = pm * p
        # error term e = (g - A B) / p^m (mod p)
        AB = [0] * (len(A) + len(B) - 1)
        for i, ai in enumerate(A):
            for j, bj in enumerate(B):
                AB[i + j] += ai * bj
        e = []
        for i in range(max(len(g), len(AB))):
            d = (g[i] if i < len(g) else 0) - (AB[i] if i < len(AB) else 0)
            assert d % pm == 0
            e.append(d // pm % p)
        e = _pp_trim(e, p)
        # corrections a (deg <= 1), b with a B + b A = e (mod p)
        _, a = _pp_divmod(_pp_mul(T, e, p), A, p)
        aB = _pp_mul(a, B, p)
        diff = _pp_trim([(x - y) % p for x, y in
                         zip(e + [0] * len(aB), aB + [0] * len(e))], p)
        b, rem = _pp_divmod(diff, A, p)
        assert not rem
        for i, c in enumerate(a):
            A[i] = (A[i] + pm * c) % mod
        for i, c in enumerate(b):
            if i < len(B):
                B[i] = (B[i] + pm * c) % mod
            else:
                B.append(pm * c % mod)
        pm = mod
    return A, B, pm


def _val_mod(n, p, cap):
    """v_p of an integer known modulo p^cap-ish (capped)."""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _unit_sextic(g, p):
    """Mobius-transform g to exact degree 6 with unit leading coefficient."""
    if len(g) == 7 and g[6] % p:
        return list(g)
    for t in range(p):
        if poly_eval_int(tuple(g), t) % p:
            gt = [0] * 7
            for i, c in enumerate(g):
                for j in range(i + 1):
                    gt[6 - j] += c * math.comb(i, j) * t ** (i - j)
            return gt
    raise UnsupportedReduction(f"no unit chart at {p}")


def _fp_factor_shape(g, p):
    """[(root_or_None, degree, multiplicity)] over F_p, plus leading unit."""
    x = sympy.Symbol("x")
    P = sympy.Poly(list(reversed([c % p for c in g])), x, modulus=p)
    lead, factors = P.factor_list()
    out = []
    for fac, mult in factors:
        cs = [int(c) % p for c in fac.all_coeffs()]
        if len(cs) == 2:
            out.append(((-cs[1] * pow(cs[0], -1, p)) % p, 1, mult))
        else:
            out.append((None, len(cs) - 1, mult))
    return out, int(lead) % p


def _two_torsion_count(gsep, p):
    """#J[2](F_p) from the factorization type of a separable sextic."""
    shape, _ = _fp_factor_shape(gsep, p)
    sizes = []
    for _, deg, mult in shape:
        assert mult == 1
        sizes.append(deg)
    assert sum(sizes) == 6
    # Galois-stable even-size subsets of the six roots, modulo complement
    even = odd = 0
    counts = {0: 1}
    for s in sizes:
        nxt = {}
        for tot, n in counts.items():
            nxt[tot] = nxt.get(tot, 0) + n
            nxt[(tot + s) % 2] = nxt.get((tot + s) % 2, 0) + n
        counts = nxt
    return counts.get(0, 0) // 2


def _node_data(g, roots, p, K=60):
    """(thickness, splitness) per rational double root of the unit sextic."""
    out = []
    for r in roots:
        Q, B, pm = _hensel_quadratic(g, r, p, K)
        disc = (Q[1] * Q[1] - 4 * Q[0]) % pm
        n = _val_mod(disc, p, K)
        if n >= K - 5:
            raise UnsupportedReduction(f"node thickness at {p} exceeds cap")
        # branch splitness: cofactor value at the node
        cof = 0
        xpow = 1
        for c in B:
            cof = (cof + c * xpow) % p
            xpow = xpow * r % p
        out.append((n, kronecker(cof, p) == 1))
    return out


def tamagawa_number(model: CurveModel, p: int) -> int:
    """Order of the group of F_p-points of the Neron component group."""
    if p == 2:
        raise UnsupportedReduction("p = 2 is out of scope")
    g = list(model.g())
    # strip even content (y-scaling isomorphism), detect ramified twist
    v = min(_val_mod(abs(c), p, 64) for c in g if c)
    g = [c // p ** (v - v % 2) for c in g]
    if v % 2:
        g1 = _unit_sextic([c // p for c in g], p)
        shape, _ = _fp_factor_shape(g1, p)
        if any(mult > 1 for _, _, mult in shape):
            raise UnsupportedReduction(
                f"ramified twist of bad reduction at {p}")
        return _two_torsion_count(g1, p)
    if model.has_good_reduction(p):
        return 1
    g = _unit_sextic(g, p)
    shape, lead = _fp_factor_shape(g, p)
    doubles = [r for r, deg, mult in shape if deg == 1 and mult == 2]
    if any(mult > 2 or (deg > 1 and mult > 1) for _, deg, mult in shape):
        raise UnsupportedReduction(f"non-nodal singular reduction at {p}")
    if not doubles:
        return 1
    nodes = _node_data(g, doubles, p)
    if len(doubles) == 1:
        n, split = nodes[0]
        return n if split else math.gcd(2, n)
    if len(doubles) == 2:
        c = 1
        for n, split in nodes:
            c *= n if split else math.gcd(2, n)
        return c
    if len(doubles) == 3:
        n1, n2, n3 = (n for n, _ in nodes)
        if kronecker(lead, p) == 1:
            return n1 * n2 + n2 * n3 + n3 * n1
        # Frobenius swaps the two components: invariants are the
        # 2-torsion of the cokernel of the cycle Gram matrix
        m11, m12, m22 = n1 + n2, -n2, n2 + n3
        d1 = math.gcd(math.gcd(m11, m12), m22)
        det = m11 * m22 - m12 * m12
        d2 = det // d1
        return math.gcd(2, d1) * math.gcd(2, d2)
    raise UnsupportedReduction(f"unclassified semistable shape at {p}")


def tamagawa_product(model: CurveModel, primes) -> int:
    """Product of tamagawa_number over the given odd primes."""
    prod = 1
    for p in primes:
        prod *= tamagawa_number(model, p)
    return prod
