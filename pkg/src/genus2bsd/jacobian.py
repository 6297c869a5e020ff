"""Divisor class group of a genus-2 curve in Mumford representation.

The models here have degree-6 f (two points at infinity), where the
classical odd-degree Cantor reduction loop does not terminate.  Classes
are therefore represented as [E - W] with E effective of degree 2 and W
the fibre over x = infinity: E = affine Mumford part (a, b) plus
multiplicities at the two infinite branches.  Addition composes the
affine parts (Cantor composition), strips fibre pairs, and performs a
single geometric reduction: interpolate the cubic c(x) with y = c
passing through the degree-4 divisor, and read off the residual
degree-2 intersection with the curve.

Works over any field providing the arithmetic protocol of the numbers
module (exact rationals included).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .curve import CurveModel, euler_factor
from .numbers import RATIONALS


class NonMaximalIdeal(Exception):
    """Mumford data with a not dividing b^2 + b h - f."""


# ----------------------------------------------------------------------
# Dense polynomial arithmetic over a field protocol (tuples, low first)
# ----------------------------------------------------------------------

def ptrim(fld, c):
    c = list(c)
    while c and fld.is_zero(c[-1]):
        c.pop()
    return tuple(c)


def padd(fld, a, b):
    n = max(len(a), len(b))
    return ptrim(fld, [fld.add(a[i] if i < len(a) else fld.zero(),
                               b[i] if i < len(b) else fld.zero())
                       for i in range(n)])


def pneg(fld, a):
    return tuple(fld.neg(x) for x in a)


def psub(fld, a, b):
    return padd(fld, a, pneg(fld, b))


def pmul(fld, a, b):
    if not a or not b:
        return ()
    out = [fld.zero()] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = fld.add(out[i + j], fld.mul(ai, bj))
    return ptrim(fld, out)


def pscale(fld, a, s):
    return ptrim(fld, [fld.mul(x, s) for x in a])


def pdivmod(fld, a, b):
    b = ptrim(fld, b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(ptrim(fld, a))
    q = [fld.zero()] * max(len(a) - len(b) + 1, 0)
    inv_lead = fld.inv(b[-1])
    while len(a) >= len(b):
        c = fld.mul(a[-1], inv_lead)
        k = len(a) - len(b)
        q[k] = c
        for i, bi in enumerate(b):
            a[k + i] = fld.sub(a[k + i], fld.mul(c, bi))
        while a and fld.is_zero(a[-1]):
            a.pop()
    return ptrim(fld, q), ptrim(fld, a)


def pmod(fld, a, b):
    return pdivmod(fld, a, b)[1]


def pmonic(fld, a):
    a = ptrim(fld, a)
    if not a:
        return a
    return pscale(fld, a, fld.inv(a[-1]))


def pxgcd(fld, a, b):
    """(g, u, v) with u a + v b = g, g monic."""
    r0, r1 = ptrim(fld, a), ptrim(fld, b)
    u0, u1 = (fld.one(),), ()
    v0, v1 = (), (fld.one(),)
    while r1:
        q, r = pdivmod(fld, r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, psub(fld, u0, pmul(fld, q, u1))
        v0, v1 = v1, psub(fld, v0, pmul(fld, q, v1))
    if not r0:
        return (), u0, v0
    s = fld.inv(r0[-1])
    return pscale(fld, r0, s), pscale(fld, u0, s), pscale(fld, v0, s)


def peval(fld, c, x):
    v = fld.zero()
    for a in reversed(c):
        v = fld.add(fld.mul(v, x), a)
    return v


def _coeff(c, i, zero):
    return c[i] if 0 <= i < len(c) else zero


# ----------------------------------------------------------------------
# Divisor classes
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class MumfordDivisor:
    """Class [E - W]: affine part (a, b) plus infinity multiplicities.

    a monic of degree <= 2, deg b < deg a, and deg a + inf_plus +
    inf_minus = 2.  The identity is a = 1 with one point on each branch.
    """

    a: tuple
    b: tuple
    inf_plus: int = 0
    inf_minus: int = 0

    @property
    def weight(self):
        return len(self.a) - 1

    def is_identity(self):
        return self.weight == 0 and self.inf_plus == 1 and self.inf_minus == 1


class Jacobian:
    """Group arithmetic on divisor classes of y^2 + h y = f over a field."""

    def __init__(self, fld, f, h):
        self.fld = fld
        self.f = ptrim(fld, tuple(fld.from_int(c) if isinstance(c, int) else c
                                  for c in f))
        self.h = ptrim(fld, tuple(fld.from_int(c) if isinstance(c, int) else c
                                  for c in h))
        f6 = _coeff(self.f, 6, fld.zero())
        h3 = _coeff(self.h, 3, fld.zero())
        # branch data at infinity: s^2 + h3 s = f6
        disc = fld.add(fld.mul(h3, h3),
                       fld.mul(fld.from_int(4), f6))
        if fld.is_zero(disc):
            raise ValueError("infinity ramifies over this field; "
                             "choose a prime not dividing h3^2 + 4 f6")
        root = fld.sqrt(disc) if fld.char != 2 else None
        if fld.char == 2:
            root = self._char2_branch(h3, f6)
        if root is None:
            self.branches = None
        else:
            if fld.char != 2:
                two_inv = fld.inv(fld.from_int(2))
                s_plus = fld.mul(fld.sub(root, h3), two_inv)
            else:
                s_plus = root
            s_minus = fld.sub(fld.neg(s_plus), h3)
            self.branches = (self._branch_series(s_plus),
                             self._branch_series(s_minus))

    def _char2_branch(self, h3, f6):
        # solve s^2 + h3 s = f6 by brute force (fields here are tiny)
        for s in self.fld.elements():
            lhs = self.fld.add(self.fld.mul(s, s), self.fld.mul(h3, s))
            if self.fld.is_zero(self.fld.sub(lhs, f6)):
                return s
        return None

    def _branch_series(self, s):
        """Laurent coefficients sigma_3..sigma_{-3} of y at an infinite
        branch: y = sigma_3 x^3 + sigma_2 x^2 + ... solving y^2 + hy = f."""
        fld = self.fld
        z = fld.zero()
        sigma = {3: s}
        h3 = _coeff(self.h, 3, z)
        denom = fld.add(fld.add(s, s), h3)
        dinv = fld.inv(denom)
        for j in range(1, 7):
            k = 6 - j  # coefficient of x^k must vanish
            acc = fld.neg(_coeff(self.f, k, z))
            for i1 in range(3 - j + 1, 4):
                i2 = k - i1
                if i2 > 3 or i2 <= 3 - j or i2 >= i1:
                    continue
                acc = fld.add(acc, fld.add(fld.mul(sigma[i1], sigma[i2]),
                                           fld.mul(sigma[i1], sigma[i2])))
            if k % 2 == 0 and k // 2 in sigma and k // 2 > 3 - j:
                v = sigma[k // 2]
                acc = fld.add(acc, fld.mul(v, v))
            for ai in range(4):
                i2 = k - ai
                if 3 - j < i2 <= 3:
                    acc = fld.add(acc, fld.mul(_coeff(self.h, ai, z),
                                               sigma[i2]))
            sigma[3 - j] = fld.mul(fld.neg(acc), dinv)
        return tuple(sigma[i] for i in range(3, -4, -1))

    @classmethod
    def of_model(cls, model: CurveModel, fld=None):
        fld = fld or RATIONALS
        conv = (lambda c: Fraction(c)) if fld is RATIONALS else fld.from_int
        return cls(fld, tuple(conv(c) for c in model.f),
                   tuple(conv(c) for c in model.h))

    def identity(self):
        return MumfordDivisor(a=(self.fld.one(),), b=(), inf_plus=1,
                              inf_minus=1)

    def is_valid(self, D):
        if D.weight + D.inf_plus + D.inf_minus != 2:
            return False
        if (D.inf_plus != D.inf_minus or D.inf_plus > 1) \
                and self.branches is None:
            return False
        if D.b and len(D.b) >= len(D.a):
            return False
        rem = pmod(self.fld, psub(self.fld,
                                  padd(self.fld, pmul(self.fld, D.b, D.b),
                                       pmul(self.fld, D.b, self.h)),
                                  self.f), D.a)
        return not rem

    def require_valid(self, D):
        if not self.is_valid(D):
            raise NonMaximalIdeal(f"invalid divisor data: {D}")

    def neg(self, D):
        b = pmod(self.fld, pneg(self.fld, padd(self.fld, D.b, self.h)), D.a)
        return MumfordDivisor(a=D.a, b=b, inf_plus=D.inf_minus,
                              inf_minus=D.inf_plus)

    def add(self, D1, D2):
        fld = self.fld
        self.require_valid(D1)
        self.require_valid(D2)
        A, B = self._compose(D1, D2)
        mp = D1.inf_plus + D2.inf_plus
        mm = D1.inf_minus + D2.inf_minus
        strip = min(mp, mm)
        mp -= strip
        mm -= strip
        total = len(A) - 1 + mp + mm
        if total == 0:
            return self.identity()
        if total == 2:
            return MumfordDivisor(a=A, b=B, inf_plus=mp, inf_minus=mm)
        # total degree 4: one geometric reduction step
        c = self._interpolate(A, B, mp, mm)
        psi = self._psi(c)
        e, rem = pdivmod(fld, psi, A)
        assert not rem, "interpolation failed to contain the divisor"
        e = pmonic(fld, e)
        vp, vm = self._infinity_orders(c, len(psi) - 1)
        bb = pmod(fld, pneg(fld, padd(fld, c, self.h)), e) if e else ()
        res = MumfordDivisor(a=e if e else (fld.one(),), b=bb,
                             inf_plus=vm - mm, inf_minus=vp - mp)
        assert res.weight + res.inf_plus + res.inf_minus == 2
        return res

    def _compose(self, D1, D2):
        """Cantor composition of the affine parts."""
        fld = self.fld
        a1, b1, a2, b2 = D1.a, D1.b, D2.a, D2.b
        d0, e1, e2 = pxgcd(fld, a1, a2)
        s = padd(fld, padd(fld, b1, b2), self.h)
        d, c1, c2 = pxgcd(fld, d0, s)
        s1 = pmul(fld, c1, e1)
        s2 = pmul(fld, c1, e2)
        s3 = c2
        num = padd(fld,
                   padd(fld, pmul(fld, pmul(fld, s1, a1), b2),
                        pmul(fld, pmul(fld, s2, a2), b1)),
                   pmul(fld, s3, padd(fld, pmul(fld, b1, b2), self.f)))
        a, rem = pdivmod(fld, pmul(fld, a1, a2), pmul(fld, d, d))
        assert not rem
        a = pmonic(fld, a)
        if len(a) == 1:
            return a, ()
        q, rem = pdivmod(fld, num, d)
        assert not rem
        return a, pmod(fld, q, a)

    def _interpolate(self, A, B, mp, mm):
        """Cubic c(x) with c = B mod A and matching mp (or mm) leading
        Laurent coefficients of y at the corresponding infinite branch.

        After stripping, at most one of mp, mm is nonzero; the branch
        conditions fix the top coefficients of the quotient c = B + q A
        one by one (the system is triangular since A is monic).
        """
        fld = self.fld
        z = fld.zero()
        m = mp + mm
        if m == 0:
            return B
        sigma = self.branches[0 if mp else 1]
        k = len(A) - 1  # deg A; deg q = 3 - k
        q = [z] * (4 - k)
        for j in range(1, m + 1):
            deg = 4 - j  # coefficient of x^deg of c must equal sigma
            target = sigma[3 - deg]  # sigma tuple starts at exponent 3
            acc = _coeff(B, deg, z)
            for i, qi in enumerate(q):
                ai = deg - i
                if 0 <= ai <= k:
                    acc = fld.add(acc, fld.mul(qi, _coeff(A, ai, z)))
            # unknown q[deg - k] has coefficient A_k = 1 (monic)
            q[deg - k] = fld.sub(target, acc)
        c = padd(fld, B, pmul(fld, tuple(q), A))
        return c

    def _psi(self, c):
        """c^2 + c h - f: its roots carry the intersection of y = c(x)."""
        fld = self.fld
        return psub(fld, padd(fld, pmul(fld, c, c), pmul(fld, c, self.h)),
                    self.f)

    def _infinity_orders(self, c, deg_psi):
        """Vanishing orders of y - c(x) at the two infinite branches."""
        fld = self.fld
        z = fld.zero()
        total = 6 - deg_psi
        if total == 0:
            return 0, 0
        if self.branches is None:
            assert total % 2 == 0
            return total // 2, total // 2
        orders = []
        for sigma in self.branches:
            v = 0
            for j, sig in enumerate(sigma):  # exponent 3 - j
                if fld.is_zero(fld.sub(sig, _coeff(c, 3 - j, z))):
                    v += 1
                else:
                    break
            orders.append(v)
        vp, vm = orders
        if vp + vm > total:  # branch series agree beyond pole budget
            raise NonMaximalIdeal("inconsistent infinity accounting")
        assert vp + vm == total, (vp, vm, total)
        return vp, vm

    def mul(self, n, D):
        if n < 0:
            return self.mul(-n, self.neg(D))
        acc = self.identity()
        base = D
        while n:
            if n & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            n >>= 1
        return acc

    def order_of(self, D, bound):
        """Exact order of D given a multiple `bound` of it."""
        if not self.mul(bound, D).is_identity():
            return None
        n = bound
        for p in _prime_divisors(bound):
            while n % p == 0 and self.mul(n // p, D).is_identity():
                n //= p
        return n

    # -- construction helpers ------------------------------------------

    def from_points(self, p1, p2):
        """Class [P1 + P2 - W] from two affine points."""
        fld = self.fld
        x1, y1 = p1
        x2, y2 = p2
        if fld.is_zero(fld.sub(x1, x2)):
            if not fld.is_zero(fld.sub(y1, y2)):
                raise NonMaximalIdeal("opposite points form the fibre class")
            return self._double_point(p1)
        a = pmul(fld, (fld.neg(x1), fld.one()), (fld.neg(x2), fld.one()))
        slope = fld.mul(fld.sub(y2, y1), fld.inv(fld.sub(x2, x1)))
        b0 = fld.sub(y1, fld.mul(slope, x1))
        return MumfordDivisor(a=a, b=ptrim(fld, (b0, slope)))

    def _double_point(self, p1):
        """2 P - W via the tangent-line b when no rational branches exist."""
        fld = self.fld
        x1, y1 = p1
        # b = y1 + t (x - x1) with t from implicit differentiation
        hx = peval(fld, self.h, x1)
        fpx = peval(fld, _pderiv(fld, self.f), x1)
        hpx = peval(fld, _pderiv(fld, self.h), x1)
        denom = fld.add(fld.add(y1, y1), hx)
        if fld.is_zero(denom):
            raise NonMaximalIdeal("doubling a Weierstrass point is the fibre")
        t = fld.mul(fld.sub(fpx, fld.mul(hpx, y1)), fld.inv(denom))
        a = pmul(fld, (fld.neg(x1), fld.one()), (fld.neg(x1), fld.one()))
        b = padd(fld, (y1,), pscale(fld, (fld.neg(x1), fld.one()), t))
        return MumfordDivisor(a=a, b=pmod(fld, b, a))

    def from_point_double(self, p1):
        """Class [2 P1 - W]."""
        fld = self.fld
        x1, y1 = p1
        hx = peval(fld, self.h, x1)
        if fld.is_zero(fld.add(fld.add(y1, y1), hx)):
            raise NonMaximalIdeal("2 x (Weierstrass point) is the fibre class")
        return self._double_point(p1)

    def from_point_infinity(self, p1, branch: int):
        """Class [P1 + infinity_branch - W] (branch 0 = plus, 1 = minus)."""
        if self.branches is None:
            raise NonMaximalIdeal("infinite points are irrational here")
        fld = self.fld
        x1, y1 = p1
        return MumfordDivisor(a=(fld.neg(x1), fld.one()), b=ptrim(fld, (y1,)),
                              inf_plus=1 - branch, inf_minus=branch)

    def enumerate(self):
        """All divisor classes over a small finite field (brute force)."""
        fld = self.fld
        out = [self.identity()]
        elems = list(fld.elements())
        if self.branches is not None:
            out.append(MumfordDivisor(a=(fld.one(),), b=(), inf_plus=2,
                                      inf_minus=0))
            out.append(MumfordDivisor(a=(fld.one(),), b=(), inf_plus=0,
                                      inf_minus=2))
        for a0 in elems:  # weight 1 + one infinite point
            a = (a0, fld.one())
            for b0 in elems:
                for ip in ((1, 0), (0, 1)) if self.branches else ():
                    D = MumfordDivisor(a=a, b=ptrim(fld, (b0,)),
                                       inf_plus=ip[0], inf_minus=ip[1])
                    if self.is_valid(D):
                        out.append(D)
        for a0 in elems:  # weight 2
            for a1 in elems:
                a = (a0, a1, fld.one())
                for b0 in elems:
                    for b1 in elems:
                        D = MumfordDivisor(a=a, b=ptrim(fld, (b0, b1)))
                        if self.is_valid(D):
                            out.append(D)
        return out


def _pderiv(fld, c):
    return ptrim(fld, [fld.mul(fld.from_int(i), c[i])
                       for i in range(1, len(c))])


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ----------------------------------------------------------------------
# Rational points and point search
# ----------------------------------------------------------------------

def rational_curve_points(model: CurveModel, height_bound: int):
    """Affine rational points (x, y) with x = m/n, |m|, n <= bound."""
    from math import gcd, isqrt

    pts = []
    g = model.g()
    seen = set()
    for n in range(1, height_bound + 1):
        for m in range(-height_bound, height_bound + 1):
            if gcd(m, n) != 1:
                continue
            x = Fraction(m, n)
            if x in seen:
                continue
            seen.add(x)
            gx = sum(Fraction(c) * x ** i for i, c in enumerate(g))
            if gx < 0:
                continue
            num, den = gx.numerator, gx.denominator
            rn, rd = isqrt(num), isqrt(den)
            if rn * rn != num or rd * rd != den:
                continue
            sq = Fraction(rn, rd)
            hx = sum(Fraction(c) * x ** i for i, c in enumerate(model.h))
            for sgn in (1, -1) if sq else (1,):
                pts.append((x, (-hx + sgn * sq) / 2))
    return pts


def search_points(model: CurveModel, height_bound: int):
    """Divisor classes from small rational points and small Mumford data.

    Deterministic list: identity, point-pair and point-doubling classes,
    point-plus-infinity classes when the infinite points are rational,
    and integral weight-2 (a, b) pairs with small coefficients.
    """
    jac = Jacobian.of_model(model)
    pts = rational_curve_points(model, min(height_bound, 30))
    out = [jac.identity()]
    for p1, p2 in itertools.combinations(pts, 2):
        if p1[0] != p2[0]:
            out.append(jac.from_points(p1, p2))
    for p in pts:
        try:
            out.append(jac.from_point_double(p))
        except NonMaximalIdeal:
            pass
        if jac.branches is not None:
            out.append(jac.from_point_infinity(p, 0))
            out.append(jac.from_point_infinity(p, 1))
    if jac.branches is not None:
        one = jac.fld.one()
        out.append(MumfordDivisor(a=(one,), b=(), inf_plus=2, inf_minus=0))
        out.append(MumfordDivisor(a=(one,), b=(), inf_plus=0, inf_minus=2))
    ab = 3 if height_bound < 100 else 5
    for a1 in range(-ab, ab + 1):
        for a0 in range(-ab, ab + 1):
            a = (Fraction(a0), Fraction(a1), Fraction(1))
            for b1 in range(-ab, ab + 1):
                for b0 in range(-ab, ab + 1):
                    b = ptrim(RATIONALS, (Fraction(b0), Fraction(b1)))
                    D = MumfordDivisor(a=a, b=b)
                    if jac.is_valid(D):
                        out.append(D)
    return out


# ----------------------------------------------------------------------
# Torsion
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TorsionReport:
    order: int
    structure: tuple
    certified: bool
    bound: int


def torsion_bound(model: CurveModel, num_primes: int = 10) -> int:
    """gcd of #Jac(F_p) over the first `num_primes` good odd primes."""
    from math import gcd

    bound = 0
    p, used = 3, 0
    while used < num_primes:
        if model.has_good_reduction(p):
            bound = gcd(bound, euler_factor(model, p).value_at_1())
            used += 1
        p = _next_prime(p)
    return bound


def _next_prime(p):
    from sympy import nextprime

    return int(nextprime(p))


def torsion_subgroup(model: CurveModel, search_bound: int = 12) -> TorsionReport:
    """Torsion order and structure; certified when search meets the bound."""
    bound = torsion_bound(model)
    jac = Jacobian.of_model(model)
    found = {}
    for D in search_points(model, search_bound):
        n = jac.order_of(D, bound)
        if n:
            found[_key(D)] = (n, D)
    group = {_key(jac.identity()): jac.identity()}
    frontier = [jac.identity()]
    gens = [D for _, D in found.values()]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = jac.add(cur, g)
            k = _key(nxt)
            if k not in group:
                group[k] = nxt
                frontier.append(nxt)
        if len(group) > bound:
            break
    order = len(group)
    structure = _abelian_structure(jac, list(group.values()), order)
    return TorsionReport(order=order, structure=structure,
                         certified=(order == bound), bound=bound)


def _key(D):
    return (D.a, D.b, D.inf_plus, D.inf_minus)


def _abelian_structure(jac, elements, order):
    if order == 1:
        return ()
    exps = sorted({jac.order_of(D, order) for D in elements})
    m = exps[-1]
    if m == order:
        return (order,)
    return (order // m, m)
