"""Kummer-surface coordinates, canonical heights, and the regulator.

A weight-2 divisor class {(x1, y1), (x2, y2)} maps to the projective
quadruple

    (k1 : k2 : k3 : k4) = (1 : x1 + x2 : x1 x2 : k4),

where k4 is the standard fourth coordinate built from the completed
square Y^2 = F(x) with F = h^2 + 4 f and Y = 2 y + h(x).  Doubling on
the Jacobian descends to four quartic forms (the duplication law) in
these coordinates.  Rather than carrying the enormous generic formulas,
the duplication law is recovered per curve by linear algebra: sample
divisor classes over several word-size prime fields, double them with
the exact group law, solve for the quartic coefficients modulo each
prime, and glue by CRT plus rational reconstruction.  The same fit
yields the defining quartic of the surface, which is used to validate
every exact coordinate vector.

The canonical height is the limit lim 4^{-n} h(2^n D) of naive heights
of primitive integer coordinate vectors.  It is evaluated as a
convergent series: archimedean terms from a normalized floating-point
iteration of the duplication law, and one bounded correction sequence
per prime that can divide the coordinate content, iterated to fixed
p-adic precision.  The height pairing and regulator follow.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, isprime

from .curve import CurveModel
from .jacobian import Jacobian, MumfordDivisor
from .numbers import GF
from .periods import PrecisionLoss


class DependentGenerators(Exception):
    """Gram determinant not positive beyond its error bound."""


class DegenerateCoordinates(Exception):
    """Divisor not in the generic stratum of the coordinate chart."""


# degree-4 monomial exponents in (k1, k2, k3, k4), fixed order
MONOMIALS = tuple(sorted(
    (e for e in itertools.product(range(5), repeat=4) if sum(e) == 4),
    reverse=True))
NMON = len(MONOMIALS)  # 35


@dataclass(frozen=True)
class KummerPoint:
    """Projective quadruple normalized to coprime integers."""

    coords: tuple

    def naive_height(self):
        return math.log(max(abs(c) for c in self.coords))


@dataclass(frozen=True)
class HeightValue:
    value: float
    error_bound: float


@dataclass(frozen=True)
class DuplicationLaw:
    """Quartic forms of doubling plus the surface's defining quartic.

    delta[i] lists the 35 integer coefficients of the i-th doubling
    form against MONOMIALS; quartic lists those of the defining
    equation of the surface (vanishing on every coordinate vector).
    """

    delta: tuple
    quartic: tuple


def completed_sextic(model: CurveModel):
    """Coefficients of F = h^2 + 4 f (ascending, length 7)."""
    h = list(model.h) + [0] * (4 - len(model.h))
    f = list(model.f) + [0] * (7 - len(model.f))
    out = [4 * c for c in f]
    for i in range(4):
        for j in range(4):
            out[i + j] += h[i] * h[j]
    return tuple(out[:7])


# ----------------------------------------------------------------------
# Coordinates of a divisor class
# ----------------------------------------------------------------------

def _coords_from_mumford(F, h, a, b, inv):
    """Quadruple for a weight-2 Mumford pair (a, b); arithmetic is any
    commutative ring given a division callback ``inv`` for the chart
    denominator.  Raises DegenerateCoordinates when x1 = x2."""
    a0, a1 = a[0], a[1]
    # B = (2 b + h) mod a, linear
    two_b = tuple(2 * c for c in b)
    hh = tuple(h) if len(h) <= 2 else None
    if hh is None:
        # reduce h modulo a by hand (a monic quadratic, ascending)
        hc = list(h) + [0] * (4 - len(h))
        # x^2 = -a0 - a1 x, x^3 = -a0 x^2 ... do two substitutions
        c3, c2, c1, c0 = hc[3], hc[2], hc[1], hc[0]
        # fold x^3 = a1^2 x + a0 x + ... : substitute x^2 -> -(a0 + a1 x)
        c1p = c1 - c3 * a0
        c2p = c2 - c3 * a1
        r1 = c1p - c2p * a1
        r0 = c0 - c2p * a0
        hh = (r0, r1)
    B0 = (two_b[0] if len(two_b) > 0 else 0) + hh[0]
    B1 = (two_b[1] if len(two_b) > 1 else 0) + hh[1]
    e1, e2 = -a1, a0
    y1y2 = B1 * B1 * a0 - B1 * B0 * a1 + B0 * B0
    f0, f1, f2, f3, f4, f5, f6 = F
    F0 = (2 * f0 + f1 * e1 + 2 * f2 * e2 + f3 * e2 * e1
          + 2 * f4 * e2 * e2 + f5 * e2 * e2 * e1 + 2 * f6 * e2 ** 3)
    den = a1 * a1 - 4 * a0
    num = F0 - 2 * y1y2
    if den == 0:
        raise DegenerateCoordinates("repeated x-coordinate")
    return (1, e1, e2, inv(num, den))


def _primitive(vec):
    """Scale a rational quadruple to coprime integers, first nonzero
    entry positive."""
    fracs = [Fraction(v) for v in vec]
    den = 1
    for fr in fracs:
        den = den * fr.denominator // math.gcd(den, fr.denominator)
    ints = [int(fr * den) for fr in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        raise DegenerateCoordinates("zero coordinate vector")
    ints = [v // g for v in ints]
    for v in ints:
        if v:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


def to_kummer(model: CurveModel, D: MumfordDivisor) -> KummerPoint:
    """Coordinates of a divisor class, normalized to coprime integers.

    Defined for the identity and for weight-2 classes with distinct
    x-coordinates; other strata raise DegenerateCoordinates (callers
    fall back to doubling, whose image is generic)."""
    if D.is_identity():
        return KummerPoint((0, 0, 0, 1))
    if D.weight != 2:
        raise DegenerateCoordinates("class outside the generic chart")
    F = completed_sextic(model)
    a = tuple(Fraction(c) for c in D.a)
    b = tuple(Fraction(c) for c in D.b)
    vec = _coords_from_mumford(F, model.h, a, b,
                               lambda n, d: Fraction(n, d))
    pt = KummerPoint(_primitive(vec))
    law = duplication_law(model)
    if _eval_form(law.quartic, pt.coords) != 0:
        raise ArithmeticError("coordinates violate the surface quartic")
    return pt


def _eval_form(coeffs, k):
    pw = [[1] * 5 for _ in range(4)]
    for i in range(4):
        for e in range(1, 5):
            pw[i][e] = pw[i][e - 1] * k[i]
    acc = 0
    for c, (e1, e2, e3, e4) in zip(coeffs, MONOMIALS):
        if c:
            acc += c * pw[0][e1] * pw[1][e2] * pw[2][e3] * pw[3][e4]
    return acc


def _eval_form_float(coeffs, k):
    pw = [[1.0] * 5 for _ in range(4)]
    for i in range(4):
        for e in range(1, 5):
            pw[i][e] = pw[i][e - 1] * k[i]
    acc = 0.0
    for c, (e1, e2, e3, e4) in zip(coeffs, MONOMIALS):
        if c:
            acc += c * pw[0][e1] * pw[1][e2] * pw[2][e3] * pw[3][e4]
    return acc


def duplicate_coords(law: DuplicationLaw, k):
    """Exact image of an integer quadruple under the doubling forms."""
    return tuple(_eval_form(d, k) for d in law.delta)


# ----------------------------------------------------------------------
# Fitting the duplication law
# ----------------------------------------------------------------------

_FIT_PRIMES = 4          # three for CRT, one held out for verification
_FIT_SAMPLES = 60
_LAW_CACHE: dict = {}


def _fit_primes(model):
    """Word-size primes of good reduction, 3 mod 4, with both infinite
    branches rational (so the group law reduces without surprises)."""
    disc = abs(model.discriminant())
    F = completed_sextic(model)
    out = []
    q = (1 << 29) + 3
    while len(out) < _FIT_PRIMES:
        q += 4  # stay 3 mod 4
        if not isprime(q) or disc % q == 0:
            continue
        if pow(F[6] % q, (q - 1) // 2, q) != 1:
            continue
        out.append(q)
    return out


def _sample_pairs(model, q, count, seed):
    """(k(D), k(2D)) pairs of mod-q quadruples with k1 normalized to 1."""
    fld = GF(q)
    jac = Jacobian.of_model(model, fld)
    F = completed_sextic(model)
    Fq = tuple(c % q for c in F)
    h = tuple(c % q for c in model.h)
    rng = random.Random(seed)
    inv = lambda n, d: n % q * pow(d, -1, q) % q
    pairs = []
    guard = 0
    while len(pairs) < count:
        guard += 1
        if guard > 200 * count:
            raise PrecisionLoss("sampling stalled; reduction too sparse")
        x1, x2 = rng.randrange(q), rng.randrange(q)
        if x1 == x2:
            continue
        ys = []
        ok = True
        for x in (x1, x2):
            Fx = sum(c * pow(x, i, q) for i, c in enumerate(Fq)) % q
            if Fx == 0 or pow(Fx, (q - 1) // 2, q) != 1:
                ok = False
                break
            Y = pow(Fx, (q + 1) // 4, q)
            hx = sum(c * pow(x, i, q) for i, c in enumerate(h)) % q
            ys.append((Y - hx) * pow(2, -1, q) % q)
        if not ok:
            continue
        y1, y2 = ys
        slope = (y2 - y1) * pow(x2 - x1, -1, q) % q
        b0 = (y1 - slope * x1) % q
        a = ((x1 * x2) % q, (-(x1 + x2)) % q, 1)
        D = MumfordDivisor(a=tuple(fld.from_int(c) for c in a),
                           b=(fld.from_int(b0), fld.from_int(slope)))
        if not jac.is_valid(D):
            continue
        D2 = jac.add(D, D)
        if D2.weight != 2 or D2.inf_plus or D2.inf_minus:
            continue
        a2 = tuple(int(c) % q for c in D2.a)
        b2 = tuple(int(c) % q for c in D2.b)
        try:
            k = _coords_from_mumford(Fq, h, (a[0], a[1]), (b0, slope), inv)
            l = _coords_from_mumford(Fq, h, (a2[0], a2[1]), b2, inv)
        except (DegenerateCoordinates, ValueError):
            continue
        pairs.append((tuple(c % q for c in k), tuple(c % q for c in l)))
    return pairs


def _monomial_values(k, q):
    pw = [[1] * 5 for _ in range(4)]
    for i in range(4):
        for e in range(1, 5):
            pw[i][e] = pw[i][e - 1] * k[i] % q
    return [pw[0][e1] * pw[1][e2] % q * pw[2][e3] % q * pw[3][e4] % q
            for (e1, e2, e3, e4) in MONOMIALS]


def _nullspace_mod(rows, ncols, q):
    """Canonical (RREF-based) nullspace basis mod q.

    Returns (pivot_columns, basis) where each basis vector is indexed
    by a free column with unit entry there."""
    mat = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c] % q:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, q)
        mat[r] = [v * inv % q for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % q:
                fac = mat[i][c]
                mat[i] = [(v - fac * w) % q for v, w in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for ri, pc in enumerate(pivots):
            vec[pc] = (-mat[ri][fc]) % q
        basis.append(vec)
    return tuple(pivots), basis


def _rational_reconstruct(r, m):
    """Unique n/d with |n|, d <= sqrt(m/2) and n ≡ r d mod m."""
    bound = math.isqrt(m // 2)
    a0, a1 = m, r % m
    x0, x1 = 0, 1
    while a1 > bound:
        quo = a0 // a1
        a0, a1 = a1, a0 - quo * a1
        x0, x1 = x1, x0 - quo * x1
    if x1 == 0 or abs(x1) > bound or math.gcd(a1, abs(x1)) != 1:
        raise PrecisionLoss("rational reconstruction failed; add primes")
    n, d = (a1, x1) if x1 > 0 else (-a1, -x1)
    if (n - r * d) % m:
        raise PrecisionLoss("rational reconstruction inconsistent")
    return Fraction(n, d)


def _integerize(vec):
    den = 1
    for fr in vec:
        den = den * fr.denominator // math.gcd(den, fr.denominator)
    ints = [int(fr * den) for fr in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(v // g for v in ints) if g else tuple(ints)


def duplication_law(model: CurveModel) -> DuplicationLaw:
    """Fit (and cache) the doubling quartics and the surface quartic."""
    key = (model.f, model.h)
    if key in _LAW_CACHE:
        return _LAW_CACHE[key]
    primes = _fit_primes(model)
    crt_primes, check_prime = primes[:-1], primes[-1]
    ncols = 4 * NMON
    pivot_ref = None
    bases = []
    for q in crt_primes:
        pairs = _sample_pairs(model, q, _FIT_SAMPLES, seed=0xD0B ^ q)
        rows = []
        for k, l in pairs:
            mons = _monomial_values(k, q)
            # l is normalized with l[0] = 1: delta_j(k) = delta_0(k) l_j
            for j in (1, 2, 3):
                row = [0] * ncols
                for t, mv in enumerate(mons):
                    row[t] = mv * l[j] % q
                    row[j * NMON + t] = (-mv) % q
                rows.append(row)
        pivots, basis = _nullspace_mod(rows, ncols, q)
        if len(basis) != 5:
            raise PrecisionLoss(
                f"doubling-law solution space has dimension {len(basis)} "
                f"mod {q} (expected 5)")
        if pivot_ref is None:
            pivot_ref = pivots
        elif pivots != pivot_ref:
            raise PrecisionLoss("pivot structure varies across primes")
        bases.append(basis)
    # CRT + rational reconstruction, entrywise
    M = 1
    for q in crt_primes:
        M *= q
    rational_basis = []
    for bi in range(5):
        entries = []
        for c in range(ncols):
            residue = 0
            for q, basis in zip(crt_primes, bases):
                Mq = M // q
                residue += basis[bi][c] * Mq * pow(Mq, -1, q)
            entries.append(_rational_reconstruct(residue % M, M))
        rational_basis.append(_integerize(entries))
    # held-out verification samples
    q4 = check_prime
    fresh = _sample_pairs(model, q4, 24, seed=0xBEEF ^ q4)
    delta = None
    quartic = None
    for vec in rational_basis:
        slots = [vec[i * NMON:(i + 1) * NMON] for i in range(4)]
        is_dup = True
        is_null = True
        for k, l in fresh:
            vals = [_eval_form(s, k) % q4 for s in slots]
            if any(vals):
                is_null = False
            if any((vals[j] - vals[0] * l[j]) % q4 for j in (1, 2, 3)) \
                    or not any(vals):
                is_dup = False
        if is_dup and delta is None:
            delta = tuple(tuple(s) for s in slots)
        if is_null and quartic is None:
            for s in slots:
                if any(s):
                    g = 0
                    for v in s:
                        g = math.gcd(g, v)
                    quartic = tuple(v // g for v in s)
                    break
    if delta is None or quartic is None:
        raise PrecisionLoss("doubling-law verification failed on held-out "
                            "prime")
    law = DuplicationLaw(delta=delta, quartic=quartic)
    _LAW_CACHE[key] = law
    return law


# ----------------------------------------------------------------------
# Canonical height
# ----------------------------------------------------------------------

def _generic_coords(model, jac, D, max_doublings=4):
    """Coordinates of D, doubling out of degenerate strata if needed.

    Returns (KummerPoint, m) where the point belongs to m*D scaling the
    height by m^2 = 4^#doublings."""
    mult = 1
    cur = D
    for _ in range(max_doublings + 1):
        try:
            return to_kummer(model, cur), mult
        except DegenerateCoordinates:
            cur = jac.add(cur, cur)
            mult *= 4
    raise PrecisionLoss("no generic representative among small multiples")


def _correction_primes(model, law, k0):
    """Primes that can divide the coordinate content along the
    iteration: bad reduction, 2, and any prime showing in the content
    of the first exact doubling step."""
    cand = {2}
    cand.update(factorint(abs(model.discriminant())).keys())
    img = duplicate_coords(law, k0)
    g = 0
    for v in img:
        g = math.gcd(g, v)
    if g > 1:
        cand.update(factorint(g).keys())
    return sorted(cand)


def _padic_epsilon_sum(law, k0, p, steps):
    """sum_n 4^{-(n+1)} eps_n with eps_n = v_p of the doubling image of
    the n-th primitive iterate, plus a tail bound."""
    eps_max = 0
    for attempt in range(4):
        M = 64 * (attempt + 1) + 4 * steps * (eps_max + 4)
        mod = p ** M
        w = tuple(c % mod for c in k0)
        prec = M
        total = Fraction(0)
        eps_seen = []
        ok = True
        for n in range(steps):
            d = tuple(_eval_form(c, w) % mod for c in law.delta)
            eps = None
            for v in d:
                if v:
                    e = 0
                    while v % p == 0:
                        v //= p
                        e += 1
                    eps = e if eps is None else min(eps, e)
            if eps is None or eps >= prec - 8:
                ok = False  # precision exhausted; retry with larger M
                break
            eps_seen.append(eps)
            total += Fraction(eps, 4 ** (n + 1))
            prec -= eps
            pe = p ** eps
            mod_next = p ** prec
            w = tuple(v // pe % mod_next for v in d)
            mod = mod_next
        if ok:
            bound = max(eps_seen[steps // 2:], default=0) + 2
            tail = bound / (3 * 4 ** steps)
            return float(total), tail
        eps_max = max(eps_max, max(eps_seen, default=0))
    raise PrecisionLoss(f"p-adic correction at p={p} did not stabilize")


def canonical_height(model: CurveModel, D: MumfordDivisor,
                     tol: float = 1e-12, max_steps: int = 40) -> HeightValue:
    """lim 4^{-n} h(2^n D) for the primitive-integer naive height h.

    Computed as h(k0) plus the telescoped series of per-step archimedean
    and p-adic normalization terms; the geometric tail is bounded
    explicitly and reported in error_bound."""
    if D.is_identity():
        return HeightValue(0.0, 0.0)
    jac = Jacobian.of_model(model)
    law = duplication_law(model)
    pt, mult = _generic_coords(model, jac, D)
    k0 = pt.coords
    # archimedean series on sup-normalized floats
    u = [c / max(abs(x) for x in k0) for c in k0]
    arch = 0.0
    coef_bound = max(sum(abs(c) for c in d) for d in law.delta)
    steps = max_steps
    for n in range(max_steps):
        w = [_eval_form_float(d, u) for d in law.delta]
        m = max(abs(x) for x in w)
        if m < 1e-200:
            raise PrecisionLoss("doubling image vanished numerically")
        arch += math.log(m) / 4 ** (n + 1)
        u = [x / m for x in w]
        if math.log(coef_bound) / 4 ** (n + 1) < tol / 8:
            steps = n + 1
            break
    arch_tail = math.log(coef_bound) / (3 * 4 ** steps)
    value = pt.naive_height() + arch
    err = arch_tail + 1e-13 * steps
    for p in _correction_primes(model, law, k0):
        total, tail = _padic_epsilon_sum(law, k0, p, steps)
        value -= total * math.log(p)
        err += tail * math.log(p)
    value /= mult
    err /= mult
    if value < 0 and abs(value) <= err + tol:
        value = 0.0
    return HeightValue(value, err + tol)


def height_pairing(model: CurveModel, D1: MumfordDivisor,
                   D2: MumfordDivisor, tol: float = 1e-12) -> HeightValue:
    """<D1, D2> = (h(D1 + D2) - h(D1) - h(D2)) / 2."""
    jac = Jacobian.of_model(model)
    hs = canonical_height(model, jac.add(D1, D2), tol)
    h1 = canonical_height(model, D1, tol)
    h2 = canonical_height(model, D2, tol)
    return HeightValue((hs.value - h1.value - h2.value) / 2,
                       (hs.error_bound + h1.error_bound + h2.error_bound) / 2)


def regulator(model: CurveModel, gens: list,
              tol: float = 1e-12) -> HeightValue:
    """Gram determinant of the height pairing on the given generators.

    Raises DependentGenerators when the determinant is not positive
    beyond the propagated error bound."""
    r = len(gens)
    if r == 0:
        return HeightValue(1.0, 0.0)
    gram = [[0.0] * r for _ in range(r)]
    errs = [[0.0] * r for _ in range(r)]
    heights = [canonical_height(model, g, tol) for g in gens]
    jac = Jacobian.of_model(model)
    for i in range(r):
        gram[i][i] = heights[i].value
        errs[i][i] = heights[i].error_bound
        for j in range(i + 1, r):
            hs = canonical_height(model, jac.add(gens[i], gens[j]), tol)
            val = (hs.value - heights[i].value - heights[j].value) / 2
            er = (hs.error_bound + heights[i].error_bound
                  + heights[j].error_bound) / 2
            gram[i][j] = gram[j][i] = val
            errs[i][j] = errs[j][i] = er
    det, det_err = _det_with_error(gram, errs)
    if det <= det_err:
        raise DependentGenerators(
            f"Gram determinant {det:.3e} within error {det_err:.3e}")
    return HeightValue(det, det_err)


def _det_with_error(mat, errs):
    """Determinant by cofactor expansion with first-order error
    propagation (matrices here are at most 2x2 or 3x3)."""
    n = len(mat)
    if n == 1:
        return mat[0][0], errs[0][0]

    def det_rec(m):
        if len(m) == 1:
            return m[0][0]
        return sum((-1) ** j * m[0][j]
                   * det_rec([row[:j] + row[j + 1:] for row in m[1:]])
                   for j in range(len(m)))

    base = det_rec(mat)
    err = 0.0
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:]
                     for k, row in enumerate(mat) if k != i]
            err += abs(det_rec(minor)) * errs[i][j]
    return base, err


# ----------------------------------------------------------------------
# Generator search
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BasisSearch:
    """Two independent generators found by point search.

    `caveat` records the saturation status: the basis is checked for
    integrality against every searched class, but points beyond the
    search bound could still halve the lattice, so the regulator carries
    an unverified-saturation caveat unless external generators are
    supplied.
    """
    generators: tuple
    heights: tuple
    caveat: str


def search_basis(model: CurveModel, bounds=(8, 16, 30),
                 tol: float = 1e-10) -> BasisSearch:
    """Rank-2 Mordell-Weil basis from searched rational divisor classes.

    Picks the smallest-height searched class and the smallest class
    independent of it, then verifies every other searched class lies in
    their integer span (re-searching at the next bound otherwise).
    Raises DependentGenerators when no independent pair exists at the
    largest bound.
    """
    from . import jacobian as _jac_mod

    jac = Jacobian.of_model(model)
    last_error = None
    for bound in bounds:
        pts = _jac_mod.search_points(model, bound)
        hcache = {}
        good = []
        for D in pts:
            if D.is_identity():
                continue
            hv = canonical_height(model, D, tol)
            if hv.value < 1e-8:
                continue
            hcache[id(D)] = hv.value
            good.append((hv.value, D))
        good.sort(key=lambda t: t[0])
        if len(good) < 2:
            last_error = f"fewer than two non-torsion classes at {bound}"
            continue

        def pairing(D1, D2):
            s = jac.add(D1, D2)
            hs = canonical_height(model, s, tol).value
            return (hs - hcache[id(D1)] - hcache[id(D2)]) / 2

        h1, P = good[0]
        chosen = None
        for h2, Q in good[1:]:
            p12 = pairing(P, Q)
            if h1 * h2 - p12 * p12 > 1e-8:
                chosen = (Q, h2, p12)
                break
        if chosen is None:
            last_error = f"no independent pair at bound {bound}"
            continue
        Q, h2, p12 = chosen
        det = h1 * h2 - p12 * p12
        integral = True
        for h, R in good:
            v1, v2 = pairing(P, R), pairing(Q, R)
            # solve the 2x2 Gram system for R's coordinates in (P, Q)
            x1 = (h2 * v1 - p12 * v2) / det
            x2 = (h1 * v2 - p12 * v1) / det
            if max(abs(x1 - round(x1)), abs(x2 - round(x2))) > 1e-4:
                integral = False
                break
        if integral:
            return BasisSearch(
                generators=(P, Q), heights=(h1, h2),
                caveat=(f"generators from point search at height bound "
                        f"{bound}; saturation verified only against "
                        "searched classes"))
        last_error = f"searched class outside the span at bound {bound}"
    raise DependentGenerators(
        f"no saturated rank-2 basis found: {last_error}")
