"""Real period of the Jacobian: period lattice from explicit cycle
contours, complex-conjugation splitting, and the volume of A(R).

Works on the completed-square model Y^2 = g(x) (Y = 2y + h), with the
holomorphic basis dx/Y and x dx/Y.  Branch cuts are rays hanging below
each branch point in a generically rotated frame, which makes sqrt(g)
globally single-valued off the cuts; each lattice generator is the
period of an explicit closed contour encircling two branch points that
are consecutive in the frame ordering.  Those five chain cycles carry
the unimodular tridiagonal intersection form, so they span the full
homology lattice; the basis is certified against the Riemann bilinear
relations before use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curve import CurveModel, poly_deg


class PathDegeneracy(Exception):
    """Branch points nearly collide with an integration path."""


class PrecisionLoss(Exception):
    """Quadrature failed to converge to the requested precision."""


@dataclass
class PeriodData:
    period_matrix: np.ndarray  # 4 lattice generators x 2 differentials
    conj_action: np.ndarray    # integer 4x4 matrix of conjugation on them
    covolume_fixed: float
    components: int
    omega: float
    error_estimate: float


# ----------------------------------------------------------------------
# Roots and segment integrals
# ----------------------------------------------------------------------

def _roots(g):
    coeffs = list(reversed(g))
    r = np.roots(coeffs)
    # Newton polish
    gp = np.polyder(np.array(coeffs, dtype=np.complex128))
    for _ in range(3):
        r = r - np.polyval(coeffs, r) / np.polyval(gp, r)
    return sorted(r, key=lambda z: (round(z.real, 10), round(z.imag, 10)))


def _choose_frame(roots):
    """Unit rotation separating the branch cuts in the rotated frame.

    In the frame zeta = c * x the cut below each branch point is the
    vertical ray {zeta_k - i t : t >= 0}; the rotation is chosen to
    maximise the least distance from any branch point to the ray of
    another, which also separates the real parts.
    """
    scale = max(abs(a - b) for a in roots for b in roots)
    best = (-1.0, None)
    for m in range(720):
        c = cmath.exp(1j * math.pi * m / 720.0)
        z = [c * r for r in roots]
        clr = scale
        for j, zj in enumerate(z):
            for k, zk in enumerate(z):
                if j != k:
                    clr = min(clr, abs(zj - zk) if zj.imag >= zk.imag
                              else abs(zj.real - zk.real))
        if clr > best[0]:
            best = (clr, c)
    if best[0] < 1e-6 * scale:
        raise PathDegeneracy("branch cuts cannot be separated")
    return best[1]


def _ray_crossings_seg(z0, z1, cuts):
    """Parameters t in (0,1) where z0 + t (z1 - z0) crosses a cut ray."""
    out = []
    d = z1 - z0
    for zc in cuts:
        if abs(d.real) < 1e-13 * (abs(d) + 1.0):
            continue
        t = (zc.real - z0.real) / d.real
        if 0.0 < t < 1.0 and (z0 + t * d).imag < zc.imag:
            out.append(t)
    return sorted(out)


def _ray_crossings_arc(center, rho, t0, t1, cuts):
    """Angles in (t0,t1) where center + rho e^{it} crosses a cut ray."""
    out = []
    for zc in cuts:
        u = (zc.real - center.real) / rho
        if abs(u) >= 1.0:
            continue
        base = math.acos(u)
        for th in (base, -base):
            for k in range(-1, 3):
                t = th + 2.0 * math.pi * k
                if t0 < t < t1 and \
                        (center + rho * cmath.exp(1j * t)).imag < zc.imag:
                    out.append(t)
    return sorted(out)


_GL_CACHE = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _integrate_atom(atom, wf, cbar, tol, depth=0):
    """Adaptive Gauss-Legendre integral of (dx/W, x dx/W) over one
    segment or arc piece, expressed in the rotated frame."""
    if atom[0] == 'seg':
        _, z0, z1 = atom
        zf = lambda t: z0 + t * (z1 - z0)
        dzf = lambda t: (z1 - z0) * np.ones_like(t)
        t0, t1 = 0.0, 1.0
    else:
        _, ctr, rho, t0, t1 = atom
        zf = lambda t: ctr + rho * np.exp(1j * t)
        dzf = lambda t: 1j * rho * np.exp(1j * t)

    def recurse(a, b, eps, lvl):
        def estimate(n):
            u, wq = _gl(n)
            t = 0.5 * (a + b) + 0.5 * (b - a) * u
            zeta = zf(t)
            W = wf(zeta)
            dz = dzf(t) * (0.5 * (b - a))
            x = cbar * zeta
            return np.array([np.sum(wq * dz / W), np.sum(wq * dz * x / W)])

        lo, hi = estimate(24), estimate(48)
        delta = float(np.max(np.abs(lo - hi)))
        if delta < eps:
            return hi, delta
        if lvl >= 24:
            raise PrecisionLoss("contour quadrature did not converge")
        mid = 0.5 * (a + b)
        r1, e1 = recurse(a, mid, 0.6 * eps, lvl + 1)
        r2, e2 = recurse(mid, b, 0.6 * eps, lvl + 1)
        return r1 + r2, e1 + e2

    return recurse(t0, t1, tol, depth)


def _expand(elem, cuts):
    """Split a segment or full circle at its cut crossings; the sheet
    flips between consecutive sub-pieces."""
    out = []
    if elem[0] == 'seg':
        _, z0, z1 = elem
        knots = [0.0] + _ray_crossings_seg(z0, z1, cuts) + [1.0]
        for a, b in zip(knots[:-1], knots[1:]):
            out.append(('seg', z0 + a * (z1 - z0), z0 + b * (z1 - z0)))
    else:
        _, ctr, rho, t0, t1 = elem
        knots = [t0] + _ray_crossings_arc(ctr, rho, t0, t1, cuts) + [t1]
        for a, b in zip(knots[:-1], knots[1:]):
            out.append(('arc', ctr, rho, a, b))
    return out


def _pair_cycles(g, tol):
    """Periods of the five chain cycles around consecutive branch-point
    pairs, each realised as an explicit closed contour."""
    lead = g[-1]
    roots = _roots(g)
    if len(roots) != 6:
        raise PathDegeneracy("expected a degree-6 branch locus")
    c = _choose_frame(roots)
    cbar = c.conjugate()  # x = cbar * zeta
    z = sorted((c * r for r in roots), key=lambda w: w.real)
    K = cmath.sqrt(-lead * cbar ** 6)  # K^2 prod(-i (zeta-zeta_k)) = g(x)

    def wf(pts):
        prod = np.full(np.shape(pts), K, dtype=np.complex128)
        for zk in z:
            prod = prod * np.sqrt(-1j * (np.asarray(pts) - zk))
        return prod

    def raydist(p, zk):
        return abs(p - zk) if p.imag >= zk.imag else abs(p.real - zk.real)

    rho = [0.4 * min(raydist(zk, zj) for j, zj in enumerate(z) if j != k)
           for k, zk in enumerate(z)]
    scale = max(abs(a - b) for a in z for b in z)
    ytop = max(w.imag for w in z) + 0.5 * scale
    circle = (math.pi / 2.0, math.pi / 2.0 + 2.0 * math.pi)

    out = []
    err_total = 0.0
    for k in range(5):
        p, q = k, k + 1
        sp = z[p] + 1j * rho[p]
        sq = z[q] + 1j * rho[q]
        tp = complex(z[p].real, ytop)
        tq = complex(z[q].real, ytop)
        elems = [('arc', z[p], rho[p], *circle),
                 ('seg', sp, tp), ('seg', tp, tq), ('seg', tq, sq),
                 ('arc', z[q], rho[q], *circle),
                 ('seg', sq, tq), ('seg', tq, tp), ('seg', tp, sp)]
        sign = 1.0
        total = np.zeros(2, dtype=np.complex128)
        for elem in elems:
            atoms = _expand(elem, z)
            for idx, atom in enumerate(atoms):
                val, e = _integrate_atom(atom, wf, cbar, 0.05 * tol)
                total += sign * val
                err_total += e
                if idx < len(atoms) - 1:
                    sign = -sign
        if sign != 1.0:
            raise PathDegeneracy("contour does not close on the surface")
        out.append(cbar * total)
    return np.array(out), err_total


# ----------------------------------------------------------------------
# Lattice assembly
# ----------------------------------------------------------------------

def _real4(v):
    return np.array([v[0].real, v[0].imag, v[1].real, v[1].imag])


def _lattice_basis(loops, tol):
    """Oriented full-lattice basis from the five chain-loop periods.

    Consistently oriented chain loops satisfy g1 + g3 + g5 = 0 (the
    three disjoint-pair loops bound the cut plane) and carry the
    unimodular tridiagonal intersection form on g1..g4, so those four
    span the whole lattice.  Orientations are recovered from the
    relation, then the basis is certified against the Riemann bilinear
    relations: Pi J Pi^T = 0 and i Pi J conj(Pi)^T definite.
    """
    import itertools as it

    g = [np.array(v) for v in loops]
    scale = max(np.max(np.abs(v)) for v in g)
    # orientation of the disjoint-pair loops from the boundary relation
    fixed = None
    for s3, s5 in it.product((1, -1), repeat=2):
        if np.max(np.abs(g[0] + s3 * g[2] + s5 * g[4])) < 1e4 * tol * scale:
            fixed = (s3, s5)
            break
    if fixed is None:
        raise PrecisionLoss("chain loops miss the boundary relation")
    g[2] = fixed[0] * g[2]
    g[4] = fixed[1] * g[4]
    pi = np.array(g[:4]).T  # 2 x 4 period matrix
    for u, v, w in it.product((1, -1), repeat=3):
        M = np.array([[0, u, 0, 0], [-u, 0, v, 0],
                      [0, -v, 0, w], [0, 0, -w, 0]], dtype=np.float64)
        # the bilinear relations hold for the inverse of the
        # intersection matrix (integral here since det M = 1)
        J = np.round(np.linalg.inv(M))
        vanish = pi @ J @ pi.T
        if np.max(np.abs(vanish)) > 1e4 * tol * scale * scale:
            continue
        H = 1j * (pi @ J @ np.conjugate(pi.T))
        eig = np.linalg.eigvalsh(H)
        if np.all(eig > 0) or np.all(eig < 0):
            return np.array(g[:4])
    raise PrecisionLoss("Riemann relations reject the chain basis")


def _conjugation_matrix(basis4, tol):
    B = np.array([_real4(b) for b in basis4]).T
    M = np.zeros((4, 4), dtype=np.int64)
    for k, s in enumerate(basis4):
        cv = _real4(np.conjugate(s))
        coef = np.linalg.solve(B, cv)
        rounded = np.round(coef)
        if np.max(np.abs(coef - rounded)) > 1e4 * tol:
            raise PrecisionLoss("conjugation is not integral on the basis")
        M[:, k] = rounded.astype(np.int64)
    return M


def _integer_kernel(M):
    """Z-basis of {x in Z^n : M x = 0} by exact integer column reduction.

    Column operations on M are mirrored on an identity matrix; kernel
    generators are the mirror columns under zero columns of the reduced
    M.  The result is saturated since Z-kernels are.
    """
    A = [[int(x) for x in row] for row in M]
    rows, cols = len(A), len(A[0])
    V = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for mat, n in ((A, rows), (V, cols)):
            for i in range(n):
                mat[i][j], mat[i][k] = (a * mat[i][j] + b * mat[i][k],
                                        c * mat[i][j] + d * mat[i][k])

    pivot_col = 0
    for r in range(rows):
        j = pivot_col
        while j < cols and all(A[i][j] == 0 for i in range(r, rows)):
            j += 1
        nz = [j for j in range(pivot_col, cols) if A[r][j] != 0]
        while len(nz) > 1:
            j, k = nz[0], nz[1]
            x, y = A[r][j], A[r][k]
            g, u, v = _xgcd(x, y)
            colop(j, k, u, v, -(y // g), x // g)
            nz = [j for j in range(pivot_col, cols) if A[r][j] != 0]
        if nz:
            j = nz[0]
            if j != pivot_col:
                colop(pivot_col, j, 0, 1, 1, 0)
            pivot_col += 1
    kernel_cols = [j for j in range(cols)
                   if all(A[i][j] == 0 for i in range(rows))]
    return np.array([[V[i][j] for j in kernel_cols] for i in range(cols)],
                    dtype=np.int64)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def real_volume(model: CurveModel, precision: float = 1e-10) -> PeriodData:
    """Volume of A(R) for the differentials (dx/Y, x dx/Y), Y^2 = g."""
    g = model.g()
    if poly_deg(g) != 6:
        raise PathDegeneracy("degree-6 completed square required")
    loops, err = _pair_cycles(tuple(float(c) for c in g), precision)
    basis4 = _lattice_basis(loops, precision)
    M = _conjugation_matrix(basis4, precision)
    if not np.array_equal(M @ M, np.eye(4, dtype=np.int64)):
        raise PrecisionLoss("conjugation matrix is not an involution")
    # fixed part: integer kernel of (M - 1); its vectors are real
    fixed = _integer_kernel(M - np.eye(4, dtype=np.int64))
    B = np.array([_real4(b) for b in basis4]).T
    fixed_vecs = (B @ fixed.astype(np.float64)).T
    if fixed.shape[1] != 2:
        raise PrecisionLoss("fixed sublattice has unexpected rank")
    # each fixed vector is (re w1, im w1, re w2, im w2) with im ~ 0
    im_norm = max(np.max(np.abs(fixed_vecs[:, 1])),
                  np.max(np.abs(fixed_vecs[:, 3])))
    real2 = fixed_vecs[:, [0, 2]]
    covol = abs(np.linalg.det(real2))
    comps = _component_count(M, precision)
    return PeriodData(period_matrix=np.array(basis4),
                      conj_action=M,
                      covolume_fixed=covol,
                      components=comps,
                      omega=covol * comps,
                      error_estimate=max(err, im_norm) * 10.0)


def _component_count(M, tol):
    """#A(R) components = #( ker(M+1) / im(M-1) ) on the lattice."""
    from fractions import Fraction

    anti = _integer_kernel(M + np.eye(4, dtype=np.int64))
    img = (M - np.eye(4, dtype=np.int64))
    # express each image column in the antifixed basis, exactly
    a_cols = [[Fraction(int(anti[i][j])) for j in range(anti.shape[1])]
              for i in range(4)]
    coords = []
    for c in range(4):
        col = [Fraction(int(img[i][c])) for i in range(4)]
        x = _solve_exact(a_cols, col)
        coords.append([int(v) for v in x])
    C = list(map(list, zip(*coords)))  # 2 x 4
    # index of the generated sublattice of Z^2 = gcd of all 2x2 minors
    g = 0
    for i in range(4):
        for j in range(i + 1, 4):
            minor = C[0][i] * C[1][j] - C[0][j] * C[1][i]
            g = math.gcd(g, abs(minor))
    return g if g else 1


def _solve_exact(a_cols, col):
    """Solve the overdetermined exact system A x = col (A full col rank)."""
    from fractions import Fraction

    k = len(a_cols[0])
    # normal equations over Q are exact and A has full column rank
    ata = [[sum(a_cols[i][r] * a_cols[i][c] for i in range(len(a_cols)))
            for c in range(k)] for r in range(k)]
    atb = [sum(a_cols[i][r] * col[i] for i in range(len(a_cols)))
           for r in range(k)]
    # tiny Gaussian elimination over Fractions
    n = k
    Mx = [row[:] + [atb[r]] for r, row in enumerate(ata)]
    for i in range(n):
        piv = next(r for r in range(i, n) if Mx[r][i] != 0)
        Mx[i], Mx[piv] = Mx[piv], Mx[i]
        inv = Fraction(1, 1) / Mx[i][i]
        Mx[i] = [v * inv for v in Mx[i]]
        for r in range(n):
            if r != i and Mx[r][i]:
                f = Mx[r][i]
                Mx[r] = [v - f * w for v, w in zip(Mx[r], Mx[i])]
    x = [Mx[i][n] for i in range(n)]
    for xi in x:
        if xi.denominator != 1:
            raise PrecisionLoss("image not integral in antifixed basis")
    return x


# ----------------------------------------------------------------------
# Real locus of the curve
# ----------------------------------------------------------------------

def components_real_locus(model: CurveModel):
    """Number of connected components of X(R) and their x-intervals."""
    g = model.g()
    rts = sorted(r.real for r in _roots(tuple(float(c) for c in g))
                 if abs(r.imag) < 1e-9)
    lead = g[-1]
    intervals = []
    pts = [-math.inf] + rts + [math.inf]
    for a, b in zip(pts[:-1], pts[1:]):
        mid = _midpoint(a, b)
        val = sum(c * mid ** i for i, c in enumerate(g))
        if val > 0:
            intervals.append((a, b))
    # merge intervals sharing an endpoint (they glue through the branch pt)
    merged = []
    for iv in intervals:
        if merged and merged[-1][1] == iv[0]:
            merged[-1] = (merged[-1][0], iv[1])
        else:
            merged.append(list(iv) if isinstance(iv, tuple) else iv)
            merged[-1] = list(iv)
    merged = [tuple(iv) for iv in merged]
    n = len(merged)
    # two unbounded intervals glue through the points at infinity (deg 6,
    # positive leading coefficient)
    if n >= 2 and merged[0][0] == -math.inf and merged[-1][1] == math.inf \
            and poly_deg(g) == 6 and lead > 0:
        n -= 1
    return n, merged


def _midpoint(a, b):
    if a == -math.inf and b == math.inf:
        return 0.0
    if a == -math.inf:
        return b - 1.0
    if b == math.inf:
        return a + 1.0
    return (a + b) / 2.0
