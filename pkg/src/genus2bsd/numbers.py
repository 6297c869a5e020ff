"""Exact arithmetic helpers: Kronecker symbols, fundamental discriminants,
small finite fields, and the real quadratic order O = End(A).

All types are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt


# ----------------------------------------------------------------------
# Kronecker symbol and discriminants
# ----------------------------------------------------------------------

def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D|n), completely multiplicative in n."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    if n < 0:
        return kronecker(D, -n) * (-1 if D < 0 else 1)
    result = 1
    # factor out 2
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol for odd n
    a = D % n if n > 1 else 0
    while n > 1:
        if a == 0:
            return 0
        t = 0
        while a % 2 == 0:
            a //= 2
            t ^= 1
        if t and n % 8 in (3, 5):
            result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return result


def is_squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental_discriminant(D: int) -> bool:
    """True for D = 1 or a discriminant of a quadratic field."""
    if D == 1:
        return True
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminant_of(d: int) -> int:
    """Fundamental discriminant of Q(sqrt(d)) for a nonsquare integer d."""
    if d == 0:
        raise ValueError("d must be nonzero")
    s = squarefree_part(d)
    return s if s % 4 == 1 else 4 * s


def squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    s = 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        if n % d == 0:
            n //= d
            s *= d
        d += 1
    return sign * s * n


@dataclass(frozen=True)
class FundamentalDiscriminant:
    D: int

    def __post_init__(self):
        if self.D >= 0 or not is_fundamental_discriminant(self.D):
            raise ValueError(f"{self.D} is not a negative fundamental discriminant")


def fundamental_discriminants_below(bound: int):
    """All negative fundamental discriminants with |D| <= bound, by |D|."""
    if bound < 3:
        raise ValueError("bound must be >= 3")
    out = []
    for a in range(3, bound + 1):
        if is_fundamental_discriminant(-a):
            out.append(FundamentalDiscriminant(-a))
    return out


# ----------------------------------------------------------------------
# The real quadratic order O = End(A) (maximal, PID in all our cases)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class QuadOrder:
    """Maximal order of Q(sqrt(d)), d > 1 squarefree, via its discriminant."""

    disc: int

    def __post_init__(self):
        if self.disc <= 1 or not is_fundamental_discriminant(self.disc):
            raise ValueError(f"{self.disc} is not a real fundamental discriminant")

    @classmethod
    def of_field(cls, d: int) -> "QuadOrder":
        return cls(fundamental_discriminant_of(d))

    @property
    def omega_is_half_integral(self) -> bool:
        """True when omega = (1 + sqrt(disc))/2, else omega = sqrt(disc)/2... """
        return self.disc % 4 == 1

    def omega_trace(self) -> int:
        # omega = (D + sqrt(D))/2 convention: trace D, norm (D^2 - D)/4
        return self.disc

    def omega_norm(self) -> int:
        return (self.disc * self.disc - self.disc) // 4

    def element(self, x: int, y: int) -> "OElement":
        return OElement(self, x, y)


@dataclass(frozen=True)
class OElement:
    """x + y*omega with omega = (D + sqrt(D))/2, D the order discriminant.

    This basis is integral for every fundamental D (both parities).
    """

    order: QuadOrder
    x: int
    y: int

    def conjugate(self) -> "OElement":
        # sigma(omega) = D - omega
        return OElement(self.order, self.x + self.y * self.order.disc, -self.y)

    def trace(self) -> int:
        return 2 * self.x + self.y * self.order.disc

    def norm(self) -> int:
        D = self.order.disc
        # N(x + y*omega) = x^2 + D*x*y + y^2*(D^2-D)/4
        return self.x * self.x + D * self.x * self.y + self.y * self.y * ((D * D - D) // 4)

    def __add__(self, other):
        self._chk(other)
        return OElement(self.order, self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        self._chk(other)
        return OElement(self.order, self.x - other.x, self.y - other.y)

    def __mul__(self, other):
        if isinstance(other, int):
            return OElement(self.order, self.x * other, self.y * other)
        self._chk(other)
        D = self.order.disc
        n = (D * D - D) // 4
        # (x1 + y1 w)(x2 + y2 w), w^2 = D w - n
        x = self.x * other.x - n * self.y * other.y
        y = self.x * other.y + self.y * other.x + D * self.y * other.y
        return OElement(self.order, x, y)

    __rmul__ = __mul__

    def embed(self, positive_root: bool = True) -> float:
        D = self.order.disc
        r = D ** 0.5 if positive_root else -(D ** 0.5)
        return self.x + self.y * (D + r) / 2

    def _chk(self, other):
        if self.order != other.order:
            raise ValueError("mixed orders")


def o_element_from_trace_norm(order: QuadOrder, tr: int, nm: int) -> OElement | None:
    """Element of O with given trace and norm, or None. Defined up to conjugation."""
    D = order.disc
    # a = (tr + b*sqrt(D))/2 with tr^2 - D b^2 = 4 nm
    num = tr * tr - 4 * nm
    if num < 0 or num % D != 0:
        return None
    b2 = num // D
    b = isqrt(b2)
    if b * b != b2:
        return None
    # x + y*omega: trace = 2x + yD, sqrt(D)-coefficient = y/2... solve:
    # a = (tr + b sqrt D)/2 = x + y (D + sqrt D)/2 -> y = b, 2x + bD = tr
    if (tr - b * D) % 2 != 0:
        return None
    return OElement(order, (tr - b * D) // 2, b)


# ----------------------------------------------------------------------
# Prime ideals of O
# ----------------------------------------------------------------------

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"


@dataclass(frozen=True)
class PrimeIdealO:
    """Prime of O above p.  For split p the two ideals are tagged 1 and 2
    via the two roots of the minimal polynomial of omega mod p."""

    order: QuadOrder
    p: int
    kind: str
    tag: int = 0  # 0 for inert/ramified, 1 or 2 for the split ideals

    @property
    def residue_field_size(self) -> int:
        return self.p * self.p if self.kind == INERT else self.p

    def omega_image(self) -> int:
        """Image of omega in O/p = F_p (split/ramified only)."""
        if self.kind == INERT:
            raise ValueError("inert prime: residue field is F_p^2")
        D, p = self.order.disc, self.p
        if p == 2:
            # omega = (D + sqrt D)/2: mod 2 handled via norm/trace arithmetic
            # roots of x^2 - D x + (D^2-D)/4 mod 2
            n = (D * D - D) // 4
            roots = [r for r in range(2) if (r * r - D * r + n) % 2 == 0]
        else:
            n = (D * D - D) // 4
            roots = [r for r in range(p) if (r * r - D * r + n) % p == 0]
        roots = sorted(set(roots))
        if self.kind == RAMIFIED:
            return roots[0]
        return roots[self.tag - 1]

    def reduce(self, a: OElement) -> int:
        """Reduction of a in the residue field F_p (split/ramified)."""
        return (a.x + a.y * self.omega_image()) % self.p

    def __str__(self):
        if self.kind == RAMIFIED:
            return f"sqrt({self.p})"
        if self.kind == INERT:
            return f"({self.p})"
        return f"{self.p}_{self.tag}"


def splitting_type(order: QuadOrder, p: int) -> list[PrimeIdealO]:
    """Prime ideals of O above p with their splitting type."""
    k = kronecker(order.disc, p)
    if k == 1:
        return [PrimeIdealO(order, p, SPLIT, 1), PrimeIdealO(order, p, SPLIT, 2)]
    if k == -1:
        return [PrimeIdealO(order, p, INERT)]
    return [PrimeIdealO(order, p, RAMIFIED)]


# ----------------------------------------------------------------------
# Small finite fields F_p and F_{p^2}
# ----------------------------------------------------------------------

class GF:
    """Prime field F_p with int-valued elements (plain functions, no wrappers)."""

    def __init__(self, p: int):
        self.p = p
        self.char = p
        self.order = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def elements(self):
        return range(self.p)

    def sqrt(self, a):
        """A square root of a mod p, or None."""
        p, a = self.p, a % self.p
        if a == 0:
            return 0
        if p == 2:
            return a
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, tt = 0, t
            while tt != 1:
                tt = tt * tt % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
        return r


class GF2:
    """Quadratic extension F_{p^2} = F_p[t]/(t^2 - nr) for odd p,
    nr the least non-residue; elements are pairs (a, b) = a + b t.
    For p = 2 uses F_4 = F_2[t]/(t^2 + t + 1)."""

    def __init__(self, p: int):
        self.p = p
        self.char = p
        self.order = p * p
        if p == 2:
            self.nr = None
        else:
            base = GF(p)
            nr = 2
            while pow(nr, (p - 1) // 2, p) == 1:
                nr += 1
            self.nr = nr

    def add(self, a, b):
        return ((a[0] + b[0]) % self.p, (a[1] + b[1]) % self.p)

    def sub(self, a, b):
        return ((a[0] - b[0]) % self.p, (a[1] - b[1]) % self.p)

    def neg(self, a):
        return ((-a[0]) % self.p, (-a[1]) % self.p)

    def mul(self, a, b):
        p = self.p
        if p == 2:
            # t^2 = t + 1
            a0, a1 = a
            b0, b1 = b
            c0 = (a0 * b0 + a1 * b1) % 2
            c1 = (a0 * b1 + a1 * b0 + a1 * b1) % 2
            return (c0, c1)
        return ((a[0] * b[0] + self.nr * a[1] * b[1]) % p,
                (a[0] * b[1] + a[1] * b[0]) % p)

    def inv(self, a):
        p = self.p
        if self.is_zero(a):
            raise ZeroDivisionError
        if p == 2:
            # Frobenius conjugate: (a0 + a1 t)^2 ... use brute force over 4 elts
            for c in self.elements():
                if self.mul(a, c) == self.one():
                    return c
        n = (a[0] * a[0] - self.nr * a[1] * a[1]) % p
        ninv = pow(n, -1, p)
        return ((a[0] * ninv) % p, (-a[1] * ninv) % p)

    def is_zero(self, a):
        return a[0] % self.p == 0 and a[1] % self.p == 0

    def zero(self):
        return (0, 0)

    def one(self):
        return (1, 0)

    def from_int(self, n):
        return (n % self.p, 0)

    def elements(self):
        for a in range(self.p):
            for b in range(self.p):
                yield (a, b)

    def sqrt(self, a):
        if self.is_zero(a):
            return self.zero()
        # brute-force is fine at the sizes we use F_{p^2} at (p <= ~3000 never
        # hits this path; sqrt in GF2 is only used by small-field Jacobian code)
        q = self.order
        # a^((q+1)/2)? q odd square... use generic: find x with x^2 = a
        # via exponentiation when q % 4 == 3 is impossible (q = p^2 = 1 mod 4).
        # Fall back to Tonelli-Shanks in the extension.
        if pow_field(self, a, (q - 1) // 2) != self.one():
            return None
        qq, s = q - 1, 0
        while qq % 2 == 0:
            qq //= 2
            s += 1
        z = None
        for cand in self.elements():
            if self.is_zero(cand):
                continue
            if pow_field(self, cand, (q - 1) // 2) != self.one():
                z = cand
                break
        m, c = s, pow_field(self, z, qq)
        t, r = pow_field(self, a, qq), pow_field(self, a, (qq + 1) // 2)
        while t != self.one():
            i, tt = 0, t
            while tt != self.one():
                tt = self.mul(tt, tt)
                i += 1
            b = c
            for _ in range(m - i - 1):
                b = self.mul(b, b)
            m, c = i, self.mul(b, b)
            t, r = self.mul(t, self.mul(b, b)), self.mul(r, b)
        return r


class QQ:
    """Field protocol wrapper for exact rationals."""

    char = 0
    order = 0

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        return Fraction(1, 1) / a

    def is_zero(self, a):
        return a == 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def sqrt(self, a):
        if a < 0:
            return None
        num, den = a.numerator, a.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
        return None


RATIONALS = QQ()


def pow_field(F, a, n: int):
    """a^n in field protocol F."""
    if n < 0:
        return pow_field(F, F.inv(a), -n)
    r = F.one()
    while n:
        if n & 1:
            r = F.mul(r, a)
        a = F.mul(a, a)
        n >>= 1
    return r


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def odd_part(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n
