"""Weight-2 modular symbols for Gamma_0(N) over a large prime field.

Self-contained derivation tool: computes traces of Hecke operators T_p
(and U_q, Atkin-Lehner involutions w_d) on the cuspidal subspace of the
space of weight-2 modular symbols for Gamma_0(N).  Restricting to the
subspace invariant under a group of Atkin-Lehner involutions gives the
Frobenius trace data of the Jacobian of the corresponding quotient of
X_0(N).

All linear algebra is done modulo one or two ~31-bit primes; the traces
we extract are small integers (bounded by dim * 4*sqrt(p)), so lifting to
the symmetric range and cross-checking two primes gives exact values.
"""

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

Q1 = (1 << 31) - 1  # Mersenne prime
Q2 = 2147483629     # another prime below 2^31


# ----------------------------------------------------------------------
# GF(q) linear algebra on numpy int64 matrices
# ----------------------------------------------------------------------

def _inv_mod(a, q):
    return pow(int(a), q - 2, q)


def rref_mod(mat, q):
    """Row-reduce mat modulo q. Returns (rref matrix, pivot column list)."""
    m = mat % q
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = (m[r] * _inv_mod(m[r, c], q)) % q
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % q
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace_mod(mat, q):
    """Basis (columns) of the right kernel of mat over GF(q)."""
    rr, pivots = rref_mod(mat, q)
    cols = mat.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-rr[i, fc]) % q
    return basis


def solve_mod(A, B, q):
    """Solve A X = B over GF(q); A must have full column rank."""
    n = A.shape[1]
    aug = np.concatenate([A % q, B % q], axis=1)
    rr, pivots = rref_mod(aug, q)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        raise ValueError("solve_mod: inconsistent or rank-deficient system")
    return rr[:n, n:]


# ----------------------------------------------------------------------
# P^1(Z/N) and the Manin-symbol presentation
# ----------------------------------------------------------------------

class P1List:
    def __init__(self, N):
        self.N = N
        units = [u for u in range(1, N) if gcd(u, N) == 1]
        reps = {}
        canon = {}
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) != 1:
                    continue
                key = min(((u * c) % N, (u * d) % N) for u in units)
                canon[(c, d)] = key
                reps[key] = key
        self.reps = sorted(reps)
        self.index = {r: i for i, r in enumerate(self.reps)}
        self._canon = canon

    def __len__(self):
        return len(self.reps)

    def normalize(self, c, d):
        return self._canon[(c % self.N, d % self.N)]

    def index_of(self, c, d):
        return self.index[self.normalize(c, d)]


def lift_to_sl2z(c, d, N):
    """Lift (c:d) mod N to a matrix [[a,b],[c',d']] in SL_2(Z)."""
    c %= N
    d %= N
    if c == 0 and gcd(d, N) == 1:
        c = N
    g = gcd(c, d) if (c, d) != (0, 0) else 0
    # adjust d modulo N to make gcd(c, d) = 1
    dd = d
    while True:
        if gcd(c, dd) == 1:
            break
        dd += N
    d = dd
    if c == 0:
        c, d = (0, 1) if d % N == 1 else (0, d)
    # solve a*d - b*c = 1
    if c == 0:
        return (1, 0, 0, 1) if d == 1 else (1, 0, 0, 1)
    g, x, y = _xgcd(d, c)
    assert g == 1
    a, b = x, -y
    assert a * d - b * c == 1
    return (a, b, c, d)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        qq, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qq * x1
        y0, y1 = y1, y0 - qq * y1
    return a, x0, y0


INF = Fraction(1, 1), 0  # marker handled separately


class ModularSymbols:
    """Weight-2 modular symbols for Gamma_0(N) over GF(q)."""

    def __init__(self, N, q=Q1):
        self.N = N
        self.q = q
        self.p1 = P1List(N)
        self._build_space()
        self._build_cusps()

    # -- presentation ---------------------------------------------------

    def _build_space(self):
        N, q = self.N, self.q
        n = len(self.p1)
        rel_rows = []
        # x + xS = 0 with S=[[0,-1],[1,0]]: (c:d)S = (d:-c)
        for i, (c, d) in enumerate(self.p1.reps):
            j = self.p1.index_of(d, -c)
            row = np.zeros(n, dtype=np.int64)
            row[i] += 1
            row[j] += 1
            rel_rows.append(row)
        # x + xT + xT^2 = 0 with T=[[0,-1],[1,-1]]: (c:d)T = (d : -c+... )
        # right action on row vector (c,d): (c,d)T = (d, -c - d)? compute:
        # (c d) * [[0,-1],[1,-1]] = (d, -c - d)
        for i, (c, d) in enumerate(self.p1.reps):
            j = self.p1.index_of(d, -c - d)
            k = self.p1.index_of(-c - d, c)
            row = np.zeros(n, dtype=np.int64)
            row[i] += 1
            row[j] += 1
            row[k] += 1
            rel_rows.append(row)
        R = np.array(rel_rows, dtype=np.int64) % q
        rr, pivots = rref_mod(R, q)
        self.free = [c for c in range(n) if c not in pivots]
        self.dim = len(self.free)
        # expression of every generator in terms of free generators
        expr = np.zeros((n, self.dim), dtype=np.int64)
        for j, fc in enumerate(self.free):
            expr[fc, j] = 1
        for i, pc in enumerate(pivots):
            for j, fc in enumerate(self.free):
                expr[pc, j] = (-rr[i, fc]) % q
        self.expr = expr  # generator -> coordinates in quotient basis

    # -- cusps ----------------------------------------------------------

    def _cusp_equiv(self, c1, c2):
        """Gamma_0(N)-equivalence of cusps given as pairs (p, q), q>=0."""
        N = self.N
        p1, q1 = c1
        p2, q2 = c2
        s1 = _inv_mod_any(p1, q1)
        s2 = _inv_mod_any(p2, q2)
        g = gcd(q1 * q2, N)
        return (s1 * q2 - s2 * q1) % g == 0 if g else True

    def _build_cusps(self):
        classes = []
        self._cusp_class_cache = {}

        def class_of(cusp):
            cusp = _normalize_cusp(cusp)
            if cusp in self._cusp_class_cache:
                return self._cusp_class_cache[cusp]
            for i, rep in enumerate(classes):
                if self._cusp_equiv(rep, cusp):
                    self._cusp_class_cache[cusp] = i
                    return i
            classes.append(cusp)
            i = len(classes) - 1
            self._cusp_class_cache[cusp] = i
            return i

        self._cusp_class_of = class_of
        n = len(self.p1)
        rows = []
        for (c, d) in self.p1.reps:
            a, b, cc, dd = lift_to_sl2z(c, d, self.N)
            i1 = class_of((b, dd))
            i0 = class_of((a, cc))
            rows.append((i1, i0))
        ncl_guess = max(max(r) for r in rows) + 1
        B = np.zeros((n, ncl_guess), dtype=np.int64)
        for i, (i1, i0) in enumerate(rows):
            B[i, i1] += 1
            B[i, i0] -= 1
        # boundary on the quotient basis: for each free generator row
        Bq = np.zeros((self.dim, B.shape[1]), dtype=np.int64)
        # boundary factors through relations; evaluate on basis via expr^T:
        # quotient coordinate vectors e_j correspond to free generators.
        for j, fc in enumerate(self.free):
            Bq[j] = B[fc]
        # but non-free generators also map to combos; the boundary of a basis
        # vector is the boundary of the free generator representing it.
        self.boundary = Bq % self.q
        self.cuspidal = nullspace_mod(self.boundary.T, self.q)
        # columns of self.cuspidal.T? nullspace of boundary^T gives vectors v
        # with v . boundary columns = 0 : we want v in M with boundary(v)=0,
        # i.e. v^T Bq = 0  <=> Bq^T v = 0.
        self.cuspidal = nullspace_mod(self.boundary.T % self.q, self.q)

    # -- converting paths to symbols -------------------------------------

    def _manin_vector_of_path(self, alpha, beta):
        """Vector in quotient coords of the symbol {alpha, beta}.

        alpha, beta are cusps: Fraction or the string 'inf'.
        """
        v = np.zeros(self.dim, dtype=np.int64)
        for cusp, sign in ((beta, 1), (alpha, -1)):
            for (c, d), coef in self._symbols_inf_to(cusp):
                idx = self.p1.index_of(c, d)
                v = (v + sign * coef * self.expr[idx]) % self.q
        return v % self.q

    def _symbols_inf_to(self, beta):
        """Manin generators occurring in {oo, beta}."""
        if beta == "inf":
            return []
        b = Fraction(beta)
        # continued fraction convergents of b
        cf = []
        num, den = b.numerator, b.denominator
        while den:
            a = num // den
            cf.append(a)
            num, den = den, num - a * den
        # convergents
        ps = [1, cf[0]]
        qs = [0, 1]
        for a in cf[1:]:
            ps.append(a * ps[-1] + ps[-2])
            qs.append(a * qs[-1] + qs[-2])
        out = []
        # {oo, p0/q0} = {g(0), g(inf)} with g=[[p0, ...]]: bottom row (q0, q_{-1}) = (1, 0)
        # path {p_{j-1}/q_{j-1}, p_j/q_j}: generator ((-1)^(j-1) q_j : q_{j-1})
        # j=0 term: {oo, p0} uses matrix [[p0, 1],[1, 0]] -> row (1, 0), det=-1.
        # fix: use [[p0, -1],[1, 0]]? det = 0*p0 +1 = 1child: [[p0,-1],[1,0]]
        # maps 0 -> -1/0? no: g(0) = -1/0 = oo, g(inf) = p0. bottom row (1,0).
        out.append(((1 % self.N, 0), 1))
        for j in range(1, len(ps) - 1):
            c = ((-1) ** (j - 1)) * qs[j + 1]
            d = qs[j]
            out.append((((c) % self.N, d % self.N), 1))
        return out

    # -- operators --------------------------------------------------------

    def _operator_matrix(self, mats):
        """Matrix (dim x dim) of sum over 2x2 integer matrices acting by
        {m g 0, m g inf} on each basis (free) generator."""
        cols = []
        for fc in self.free:
            c, d = self.p1.reps[fc]
            a, b, cc, dd = lift_to_sl2z(c, d, self.N)
            v = np.zeros(self.dim, dtype=np.int64)
            g0 = (a, cc)   # g(0) = a/c
            g1 = (b, dd)   # g(inf)? g(inf) = a/c? careful below
            # g = [[a, b],[cc, dd]]; g(0) = b/dd, g(inf) = a/cc
            for m in mats:
                m11, m12, m21, m22 = m
                alpha = _apply_frac((m11, m12, m21, m22), (b, dd))
                beta = _apply_frac((m11, m12, m21, m22), (a, cc))
                v = (v + self._manin_vector_of_path(alpha, beta)) % self.q
            cols.append(v)
        return np.array(cols, dtype=np.int64).T % self.q

    def hecke_matrix(self, p):
        """T_p for p prime not dividing N (or U_p when p | N)."""
        if self.N % p == 0:
            mats = [(1, j, 0, p) for j in range(p)]
        else:
            mats = [(1, j, 0, p) for j in range(p)] + [(p, 0, 0, 1)]
        return self._operator_matrix(mats)

    def atkin_lehner_matrix(self, d):
        N = self.N
        assert N % d == 0 and gcd(d, N // d) == 1
        nd = N // d
        g, x, _ = _xgcd(d, nd)
        assert g == 1
        # x*d + _*nd = 1 -> x*d ≡ 1 mod N/d
        x %= nd
        b = (x * d - 1) // nd
        W = (d * x, b, N, d)
        assert W[0] * W[3] - W[1] * W[2] == d
        return self._operator_matrix([W])

    def restrict_to_cuspidal(self, opmat):
        """Matrix of operator on the cuspidal subspace basis."""
        C = self.cuspidal
        OC = (opmat @ C) % self.q
        return solve_mod(C, OC, self.q)


def matmul_mod(a, b, q):
    """(a @ b) % q without int64 overflow (entries may be ~q ~ 2^31)."""
    return np.array((a.astype(object) @ b.astype(object)) % q, dtype=np.int64)


def _inv_mod_any(p, q):
    """s with p*s = 1 mod q; for q = 0 the exact integer inverse (p = +-1)."""
    if q == 0:
        return p  # cusp normalized, so p = 1
    if q == 1:
        return 0
    return pow(p % q, -1, q)


def _normalize_cusp(cusp):
    p, q = cusp
    if q == 0:
        return (1, 0)
    if q < 0:
        p, q = -p, -q
    g = gcd(abs(p), q)
    if g:
        p //= g
        q //= g
    return (p, q)


def _apply_frac(m, pq):
    """Apply integer matrix m to cusp p/q (q may be 0)."""
    a, b, c, d = m
    p, q = pq
    np_, nq = a * p + b * q, c * p + d * q
    if nq == 0:
        return "inf"
    return Fraction(np_, nq)


def lift_symmetric(x, q):
    x %= q
    return x - q if x > q // 2 else x


def traces_for_quotient(N, al_divisors, primes, q=Q1):
    """Return dict with exact small-integer trace data for Jac(X_0(N)/W).

    al_divisors: list of d defining the Atkin-Lehner subgroup generators.
    primes: list of primes p (good or bad) at which to compute traces.

    Output per prime p: trace of T_p (resp. U_p) on the W-invariant
    cuspidal subspace of H_1, which equals 2 * (sum of eigenvalues a_p over
    the two newforms) for good p.
    """
    ms = ModularSymbols(N, q)
    # projector onto W-invariants: average over the subgroup generated
    group = [frozenset()]
    mats = {d: ms.restrict_to_cuspidal(ms.atkin_lehner_matrix(d)) for d in al_divisors}
    dimc = ms.cuspidal.shape[1]
    ident = np.eye(dimc, dtype=np.int64)
    # subgroup elements: products of subsets of generators (they commute)
    from itertools import combinations
    elems = [ident]
    for r in range(1, len(al_divisors) + 1):
        for combo in combinations(al_divisors, r):
            m = ident
            for d in combo:
                m = matmul_mod(m, mats[d], q)
            elems.append(m)
    inv_card = _inv_mod(len(elems), q)
    P = ident * 0
    for m in elems:
        P = (P + m) % q
    P = (P * inv_card) % q
    # sanity: P is idempotent
    assert np.array_equal(matmul_mod(P, P, q), P % q)
    invdim = int(np.trace(P) % q)
    invdim = lift_symmetric(invdim, q)
    out = {"N": N, "al": list(al_divisors), "dim_H1": dimc,
           "dim_inv": invdim, "traces": {}, "traces_sq": {}}
    for p in primes:
        T = ms.restrict_to_cuspidal(ms.hecke_matrix(p))
        TP = matmul_mod(T, P, q)
        tr = lift_symmetric(int(np.trace(TP) % q), q)
        tr2 = lift_symmetric(int(np.trace(matmul_mod(TP, T, q)) % q), q)
        out["traces"][p] = tr
        out["traces_sq"][p] = tr2  # trace of T_p^2 restricted to invariants
    return out


if __name__ == "__main__":
    # quick self-test on X_0(11), elliptic curve 11a: a_2=-2 a_3=-1 a_5=1 a_7=-2 a_13=4
    res = traces_for_quotient(11, [], [2, 3, 7, 13])
    assert res["dim_H1"] == 2, res
    assert res["traces"][2] == -4, res
    assert res["traces"][3] == -2, res
    assert res["traces"][7] == -4, res
    assert res["traces"][13] == 8, res
    print("X0(11) OK:", res)
    res23 = traces_for_quotient(23, [], [2, 3, 5, 7])
    print("X0(23):", res23)
