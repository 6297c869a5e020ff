"""Search for integral models y^2 + h y = f of the 28 quotient curves.

Targets are the Frobenius traces in tools/traces.json (derived from
modular symbols).  For each curve we scan h with coefficients in {0,1}
(deg <= 3) and f with coefficients in [-B, B] (deg <= 6), keep candidates
whose point counts match e1 at every good odd prime up to 53 and at 2,
then gate on exact bad-prime support == primes(N).

Writes tools/models_found.json: label -> list of surviving (h, f).
"""

import json
import sys
import time
from itertools import product

import numpy as np
from numba import njit
from sympy import primerange

sys.path.insert(0, "/root/pkg/src")
from genus2bsd.curve import CurveModel  # noqa: E402

B = 3
FILTER_PRIMES = 14  # filter/verify with good primes up to this many


@njit(cache=True)
def batch_e1(g, p, sq, out):
    # g: (n, 7) int64 coeffs of the completed square; out: (n,) e1 values
    n = g.shape[0]
    for i in range(n):
        cnt = 0
        for x in range(p):
            v = 0
            for j in range(6, -1, -1):
                v = (v * x + g[i, j]) % p
            if v == 0:
                cnt += 1
            elif sq[v]:
                cnt += 2
        lc = g[i, 6] % p
        if lc == 0:
            cnt += 1
        elif sq[lc]:
            cnt += 2
        out[i] = p + 1 - cnt
    return out


def sq_table(p):
    sq = np.zeros(p, dtype=np.uint8)
    for y in range(p):
        sq[(y * y) % p] = 1
    return sq


def count_f2(fc, hc):
    # points over F_2 of y^2 + h y = f including infinity
    n = 0
    for x in (0, 1):
        hx = sum(hc[i] * x ** i for i in range(len(hc))) % 2
        fx = sum(fc[i] * x ** i for i in range(len(fc))) % 2
        n += sum(1 for y in (0, 1) if (y * y + hx * y - fx) % 2 == 0)
    h3 = (hc[3] if len(hc) > 3 else 0) % 2
    f6 = (fc[6] if len(fc) > 6 else 0) % 2
    if h3 == 0 and f6 == 0:
        n += 1
    else:
        n += sum(1 for y in (0, 1) if (y * y + h3 * y - f6) % 2 == 0)
    return n


def search_curve(label, N, targets, f_all, h_range):
    """targets: {p: e1}; returns list of (h, f) tuples passing all gates."""
    bad = {p for p in primerange(2, 400) if N % p == 0}
    goodp = [p for p in sorted(targets) if p not in bad and p != 2]
    goodp = goodp[:FILTER_PRIMES]
    nf = f_all.shape[0]
    survivors_total = []
    for h in h_range:
        hh = np.zeros(7, dtype=np.int64)
        for i, a in enumerate(h):
            for j, b in enumerate(h):
                hh[i + j] += a * b
        g = 4 * f_all.astype(np.int64) + hh  # (nf, 7)
        idx = np.arange(nf)
        for p in goodp:
            out = np.empty(g.shape[0], dtype=np.int64)
            batch_e1(g, p, sq_table(p), out)
            keep = out == targets[p]
            g = g[keep]
            idx = idx[keep]
            if g.shape[0] == 0:
                break
        if g.shape[0] == 0:
            continue
        # exact gates on the few survivors
        for i in idx:
            f = tuple(int(a) for a in f_all[i])
            if 2 in targets and 3 - count_f2(f, h) != targets[2]:
                continue
            try:
                m = CurveModel(f=f, h=h, label=label, level=N)
            except ValueError:
                continue
            if set(m.bad_primes()) != bad:
                continue
            survivors_total.append((list(h), list(f)))
    return survivors_total


def main():
    traces = json.load(open("/root/pkg/tools/traces.json"))
    labels = sys.argv[1:] or list(traces)
    coeffs = np.array(list(product(range(-B, B + 1), repeat=7)), dtype=np.int8)
    h_range = [tuple(h) for h in product((0, 1), repeat=4)]
    out_path = "/root/pkg/tools/models_found.json"
    try:
        found = json.load(open(out_path))
    except FileNotFoundError:
        found = {}
    for label in labels:
        rec = traces[label]
        targets = {2: None}
        targets = {int(p): v[0] for p, v in rec["good"].items()}
        t0 = time.time()
        res = search_curve(label, rec["N"], targets, coeffs, h_range)
        found[label] = res
        print(f"{label}: {len(res)} models ({time.time()-t0:.1f}s)", flush=True)
        json.dump(found, open(out_path, "w"), indent=0)


if __name__ == "__main__":
    main()
