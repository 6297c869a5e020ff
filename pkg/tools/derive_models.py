#!/usr/bin/env python3
"""Derive integral genus-2 models from Hecke eigenform q-expansions.

For each label the stored trace data pin the pair of conjugate eigenforms
(f, f^sigma) spanning the 2-dimensional invariant cuspidal subspace.  The
symmetric functions (e1, e2) determine a_p only up to conjugation per prime;
the relative embedding choices are fixed with cross traces tr(T_p T_l)
computed on the invariant subspace with modular symbols.  From a saturated
integral basis (G1, G2) of the q-expansion lattice we set

    x = G1/G2,   y = q (dx/dq) / G2,

and solve y^2 + h(x) y = f(x) exactly over the rationals.  The resulting
model is validated against point counts before being written out.

Run from the repository root:  python3 tools/derive_models.py
"""

import json
import os
import sys
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                os.pardir, "src"))

from modsym import (Q1, ModularSymbols, lift_symmetric, matmul_mod,
                    nullspace_mod, rref_mod, solve_mod, _inv_mod)

M = 58  # a_n is computed for n <= M (needs a_p for all primes <= M)


# ----------------------------------------------------------------------
# exact arithmetic in Q(sqrt(m)): elements are (u, v) meaning u + v*sqrt(m)
# ----------------------------------------------------------------------

def qmul(a, b, m):
    return (a[0] * b[0] + a[1] * b[1] * m, a[0] * b[1] + a[1] * b[0])


def qsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def qscale(a, c):
    return (a[0] * c, a[1] * c)


def good_ap_abs(e1, e2, p, m):
    """(u, k) with a_p = u + (sign)*k*sqrt(m), sign not yet determined."""
    disc = e1 * e1 - 4 * (e2 - 2 * p)
    assert disc >= 0, (e1, e2, p)
    k2, rem = divmod(disc, m)
    assert rem == 0, f"disc {disc} not divisible by field disc part {m}"
    k = isqrt(k2)
    assert k * k == k2, (disc, m)
    return Fraction(e1, 2), Fraction(k, 2)


# ----------------------------------------------------------------------
# embedding coherence via cross traces on the invariant newform subspace
# ----------------------------------------------------------------------

def invariant_cross_traces(N, al, p_star, e_star, others, q=Q1):
    """tr(T_{p*} T_l) on the 4-dim newform-invariant part, for l in others."""
    ms = ModularSymbols(N, q)
    dimc = ms.cuspidal.shape[1]
    ident = np.eye(dimc, dtype=np.int64)
    almats = {d: ms.restrict_to_cuspidal(ms.atkin_lehner_matrix(d)) for d in al}
    from itertools import combinations
    elems = [ident]
    for r in range(1, len(al) + 1):
        for combo in combinations(al, r):
            mm = ident
            for d in combo:
                mm = matmul_mod(mm, almats[d], q)
            elems.append(mm)
    P = ident * 0
    for mm in elems:
        P = (P + mm) % q
    P = (P * _inv_mod(len(elems), q)) % q
    # basis W of the invariant subspace = column space of P
    rr, _ = rref_mod(P.T % q, q)
    W = rr.T % q
    Tstar = ms.restrict_to_cuspidal(ms.hecke_matrix(p_star))
    TstarW = solve_mod(W, matmul_mod(Tstar, W, q), q)
    # cut to the newform orbit: kernel of T*^2 - e1 T* + (e2 - 2p*)
    e1, e2 = e_star
    QT = (matmul_mod(TstarW, TstarW, q) - e1 * TstarW
          + (e2 - 2 * p_star) * np.eye(W.shape[1], dtype=np.int64)) % q
    B = nullspace_mod(QT, q)
    assert B.shape[1] == 4, f"newform cut has dim {B.shape[1]} at level {N}"
    WB = matmul_mod(W, B, q)
    TstarB = solve_mod(WB, matmul_mod(Tstar, WB, q), q)
    out = {}
    for l in others:
        Tl = ms.restrict_to_cuspidal(ms.hecke_matrix(l))
        TlB = solve_mod(WB, matmul_mod(Tl, WB, q), q)
        tr = int(np.trace(matmul_mod(TstarB, TlB, q)) % q)
        out[l] = lift_symmetric(tr, q)
    return out


def coherent_eigenvalues(entry):
    """a_p as (u, v) pairs (meaning u + v sqrt(m)) for all primes <= M."""
    N = entry["N"]
    m = entry["rm_disc_field"]
    good = {int(p): tuple(v) for p, v in entry["good"].items()}
    bad = {int(p): v for p, v in entry["bad_u_traces"].items()}
    parts = {}
    irr = []  # primes with genuinely irrational a_p
    for p, (e1, e2) in sorted(good.items()):
        u, k = good_ap_abs(e1, e2, p, m)
        parts[p] = (u, k)
        if k:
            irr.append(p)
    assert irr, f"level {N}: all listed a_p rational, cannot fix embedding"
    p_star = irr[0]
    signs = {p_star: 1}
    if len(irr) > 1:
        crosses = invariant_cross_traces(N, entry["al"], p_star,
                                         good[p_star], irr[1:])
        e1s, ks = good[p_star][0], parts[p_star][1]
        for l in irr[1:]:
            e1l, kl = good[l][0], parts[l][1]
            # tr(T_p* T_l) on 4-dim space = 2 Tr_{K/Q}(a_p* a_l)
            got = None
            for s in (1, -1):
                val = 4 * (Fraction(e1s, 2) * Fraction(e1l, 2)
                           + s * ks * kl * m)
                assert val.denominator == 1
                if int(val) == crosses[l]:
                    assert got is None, f"ambiguous sign at ({p_star},{l})"
                    got = s
            assert got is not None, (
                f"level {N}: cross trace {crosses[l]} at ({p_star},{l}) "
                f"matches neither sign")
            signs[l] = got
    ap = {}
    for p, (u, k) in parts.items():
        ap[p] = (u, signs.get(p, 1) * k)
    for p, t in bad.items():
        ap[p] = (Fraction(t, 2), Fraction(0))
    return ap, set(bad), m


def coefficient_table(ap, bad_primes, m, nmax=M):
    """Multiplicative extension: a_n for 1 <= n <= nmax."""
    a = {1: (Fraction(1), Fraction(0))}
    for p in sorted(ap):
        if p > nmax:
            continue
        # prime powers
        pk, prev, cur = p, a[1], ap[p]
        a[p] = cur
        while pk * p <= nmax:
            pk *= p
            if p in bad_primes:
                nxt = qmul(cur, ap[p], m)
            else:
                nxt = qsub(qmul(ap[p], cur, m), qscale(prev, p))
            prev, cur = cur, nxt
            a[pk] = cur
    out = {}
    for n in range(1, nmax + 1):
        # factor n into prime powers present in a
        val = (Fraction(1), Fraction(0))
        nn = n
        ok = True
        for p in sorted(ap):
            if nn % p == 0:
                pk = 1
                while nn % p == 0:
                    nn //= p
                    pk *= p
                if pk not in a:
                    ok = False
                    break
                val = qmul(val, a[pk], m)
        if ok and nn == 1:
            out[n] = val
    assert set(out) == set(range(1, nmax + 1))
    return out


# ----------------------------------------------------------------------
# integral q-expansion lattice
# ----------------------------------------------------------------------

def integer_rows(coeffs, nmax=M):
    """Rows (trace f, (f - f^sigma)/sqrt(m)) of integer q-coefficients."""
    r0, r1 = [], []
    for n in range(1, nmax + 1):
        u, v = coeffs[n]
        t, w = 2 * u, 2 * v
        assert t.denominator == 1 and w.denominator == 1, (n, u, v)
        r0.append(int(t))
        r1.append(int(w))
    return r0, r1


def _prime_factors(n):
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def saturate(r0, r1):
    """Basis of the saturation of Z r0 + Z r1 inside Z^M."""
    r0, r1 = list(r0), list(r1)
    while True:
        # candidate primes: divisors of row contents and of the minor gcd
        c0 = 0
        for c in r0:
            c0 = gcd(c0, c)
        c1 = 0
        for c in r1:
            c1 = gcd(c1, c)
        g2 = 0
        for i in range(len(r0)):
            for j in range(i + 1, len(r0)):
                g2 = gcd(g2, r0[i] * r1[j] - r0[j] * r1[i])
                if g2 == 1:
                    break
            if g2 == 1:
                break
        cand = _prime_factors(c0) | _prime_factors(c1) | _prime_factors(g2)
        grown = False
        for t in sorted(cand):
            combos = [(1, b) for b in range(t)] + [(0, 1)]
            for (al, be) in combos:
                if all((al * x + be * y) % t == 0 for x, y in zip(r0, r1)):
                    w = [(al * x + be * y) // t for x, y in zip(r0, r1)]
                    if al % t != 0:
                        r0 = w
                    else:
                        r1 = w
                    grown = True
                    break
            if grown:
                break
        if not grown:
            return r0, r1


def echelon_basis(r0, r1):
    """(G1, G2) with G1 = q + O(q^3), G2 = q^2 + O(q^3), as Fraction lists."""
    A = [[Fraction(r0[0]), Fraction(r0[1])], [Fraction(r1[0]), Fraction(r1[1])]]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    assert det != 0, "echelon basis degenerate: cusp is a Weierstrass point?"
    inv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
    G1 = [inv[0][0] * x + inv[0][1] * y for x, y in zip(r0, r1)]
    G2 = [inv[1][0] * x + inv[1][1] * y for x, y in zip(r0, r1)]
    assert G1[0] == 1 and G1[1] == 0 and G2[0] == 0 and G2[1] == 1
    return G1, G2


# ----------------------------------------------------------------------
# exact Laurent series (coefficients Fraction), truncated at exponent prec
# ----------------------------------------------------------------------

class Ser:
    __slots__ = ("val", "c", "prec")

    def __init__(self, val, coeffs, prec):
        self.val, self.c, self.prec = val, list(coeffs), prec
        assert len(self.c) == prec - val

    def coeff(self, e):
        assert e < self.prec
        if e < self.val:
            return Fraction(0)
        return self.c[e - self.val]

    def mul(self, other):
        val = self.val + other.val
        prec = min(self.val + other.prec, other.val + self.prec)
        n = prec - val
        out = [Fraction(0)] * n
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            jmax = min(len(other.c), n - i)
            for j in range(jmax):
                b = other.c[j]
                if b:
                    out[i + j] += a * b
        return Ser(val, out, prec)

    def inv(self):
        assert self.c[0] != 0
        n = len(self.c)
        inv0 = 1 / self.c[0]
        out = [Fraction(0)] * n
        out[0] = inv0
        for k in range(1, n):
            s = Fraction(0)
            for j in range(1, k + 1):
                if self.c[j]:
                    s += self.c[j] * out[k - j]
            out[k] = -inv0 * s
        return Ser(-self.val, out, -self.val + n)

    def qdq(self):
        """q * d/dq."""
        out = [(self.val + i) * a for i, a in enumerate(self.c)]
        return Ser(self.val, out, self.prec)


def derive_model(entry):
    ap, badp, m = coherent_eigenvalues(entry)
    coeffs = coefficient_table(ap, badp, m)
    r0, r1 = integer_rows(coeffs)
    r0, r1 = saturate(r0, r1)
    G1l, G2l = echelon_basis(r0, r1)
    G1 = Ser(1, G1l, M + 1)
    assert G2l[0] == 0
    G2 = Ser(2, G2l[1:], M + 1)
    x = G1.mul(G2.inv())          # q^-1 + O(1)
    y = x.qdq().mul(G2.inv())     # -q^-3 + ...
    one = Ser(0, [Fraction(1)] + [Fraction(0)] * (M + 6), M + 7)
    xs = [one]
    while len(xs) < 7:
        xs.append(xs[-1].mul(x))
    xy = [y]
    while len(xy) < 4:
        xy.append(xy[-1].mul(x))
    y2 = y.mul(y)
    # unknowns: f0..f6, h0..h3 with  sum f_i x^i - sum h_j x^j y = y^2
    emin = -6
    emax = min([s.prec for s in xs] + [s.prec for s in xy] + [y2.prec])
    rows, rhs = [], []
    for e in range(emin, emax):
        rows.append([s.coeff(e) for s in xs] + [-s.coeff(e) for s in xy])
        rhs.append(y2.coeff(e))
    sol = solve_exact(rows, rhs)
    f = sol[:7]
    h = sol[7:]
    return normalize_two(h, f)


def normalize_two(h, f):
    """Scale y by 2 and complete: y^2 = F becomes Y^2 + u Y = (F - u^2)/4."""
    assert all(c == 0 for c in h), "expected an odd hyperelliptic coordinate"
    assert all(c.denominator == 1 for c in f), f
    G = [int(c) for c in f] + [0] * (7 - len(f))
    from itertools import product
    for bits in product((0, 1), repeat=4):
        u = list(bits)
        u2 = [0] * 7
        for i, a in enumerate(u):
            for j, b in enumerate(u):
                u2[i + j] += a * b
        if all((g - s) % 4 == 0 for g, s in zip(G, u2)):
            f2 = [(g - s) // 4 for g, s in zip(G, u2)]
            return [Fraction(c) for c in u], [Fraction(c) for c in f2]
    # no integral completion: keep the y^2 = G form
    return [Fraction(0)] * 4, [Fraction(c) for c in G]


def solve_exact(rows, rhs):
    """Solve an overdetermined consistent linear system over Q exactly."""
    n = len(rows[0])
    aug = [row + [b] for row, b in zip(rows, rhs)]
    piv = 0
    for col in range(n):
        sel = None
        for r in range(piv, len(aug)):
            if aug[r][col] != 0:
                sel = r
                break
        assert sel is not None, f"rank deficient at column {col}"
        aug[piv], aug[sel] = aug[sel], aug[piv]
        pv = aug[piv][col]
        aug[piv] = [a / pv for a in aug[piv]]
        for r in range(len(aug)):
            if r != piv and aug[r][col] != 0:
                fac = aug[r][col]
                aug[r] = [a - fac * b for a, b in zip(aug[r], aug[piv])]
        piv += 1
    for r in range(piv, len(aug)):
        assert all(a == 0 for a in aug[r]), "inconsistent system"
    return [aug[i][n] for i in range(n)]


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    traces = json.load(open(os.path.join(here, "traces.json")))
    from genus2bsd.curve import CurveModel, euler_factor
    out = {}
    for label, entry in traces.items():
        h, f = derive_model(entry)
        hs = [int(c) for c in h]
        fs = [int(c) for c in f]
        assert all(Fraction(a) == b for a, b in zip(hs, h)), (label, h)
        assert all(Fraction(a) == b for a, b in zip(fs, f)), (label, f)
        model = CurveModel(f=tuple(fs), h=tuple(hs))
        # validation 1: singular reduction only at primes of the level
        N = entry["N"]
        D = abs(model.discriminant())
        bad = set(model.bad_primes())
        assert bad <= _prime_factors(N), (label, bad, N)
        # validation 2: euler data at good primes matches the trace data
        for p, (e1, e2) in sorted(entry["good"].items(), key=lambda kv: int(kv[0])):
            p = int(p)
            ef = euler_factor(model, p)
            assert ef.e1 == e1 and ef.e2 == e2, (label, p, ef.e1, ef.e2, e1, e2)
        vals = {}
        for p in sorted(_prime_factors(N)):
            v = 0
            while D % p == 0:
                D //= p
                v += 1
            vals[p] = v
        print(f"{label}: h={hs} f={fs} disc vals {vals}")
        out[label] = {"h": hs, "f": fs}
    path = os.path.join(here, "models_canonical.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)
    print(f"wrote {len(out)} models to {path}")


if __name__ == "__main__":
    main()
