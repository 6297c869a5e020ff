"""Heegner discriminant search and Heegner-index bookkeeping.

A negative fundamental discriminant D is a Heegner discriminant for a
level-N quotient when every prime dividing N splits in Q(sqrt D) and
the analytic rank over the imaginary quadratic field K = Q(sqrt D) —
the rank of A plus the rank of the D-twist — equals dim A = 2.  The
search enumerates fundamental D < 0 by |D| and tests both conditions;
the twist ranks come from the L-function evaluator.

Heegner indices I_D are ingested from the data records (computing them
needs the modular parametrization); only the divisibility bookkeeping
c_odd | I_odd is performed here.
"""

from __future__ import annotations

from dataclasses import dataclass

from sympy import primefactors

from .curve import CurveModel
from .lfunction import coefficients, analytic_rank, required_m
from .numbers import kronecker, fundamental_discriminants_below


class SearchExhausted(Exception):
    """No further admissible discriminant below the configured bound."""


@dataclass(frozen=True)
class HeegnerDatum:
    D: int
    split_ok: bool
    rank_condition_ok: bool
    twist_rank: int | None
    rank_basis: str = "analytic"   # "analytic" | "parity"
    index_odd_part: int | None = None


@dataclass(frozen=True)
class IndexDivisibility:
    c_odd: int
    index_odd: int
    verdict: bool
    quotient: int | None


def splits_everywhere(N: int, D: int) -> bool:
    return all(kronecker(D, p) == 1 for p in primefactors(N))


def find_heegner_discriminants(model: CurveModel, how_many: int,
                               bad_factors: dict, rank: int,
                               search_bound: int = 400,
                               eps: float = 1e-7,
                               max_coefficients: int = 150_000) -> list:
    """First `how_many` Heegner discriminants for the model, by |D|.

    rank is the analytic rank of A itself (0 or 2 here); the rank
    condition demands rank + rank(twist by D) = 2.  Discriminants -3
    and -4 carry extra units and are excluded, matching the classical
    Heegner-point setup.

    The twist rank is evaluated analytically while the approximate
    functional equation stays below max_coefficients terms.  Beyond
    that, the Heegner hypothesis forces the sign over the imaginary
    quadratic field to -1, so the rank condition holds unless the
    twisted L-function has an atypical extra double zero; such data are
    returned with rank_basis = "parity" and no claimed twist rank."""
    N = model.level
    out = []
    for fd in fundamental_discriminants_below(search_bound):
        D = fd.D
        if D % 2 == 0 or D in (-3, -4):
            # even D is ramified at 2; -3 has extra units
            continue
        if not splits_everywhere(N, D):
            continue
        M = required_m(N * D * D, eps, 1.1)
        if M <= max_coefficients:
            ls = coefficients(model, M, bad_factors, level=N, twist_D=D)
            tw = analytic_rank(ls, eps=eps)
            if not isinstance(tw, int):
                continue
            out.append(HeegnerDatum(D=D, split_ok=True,
                                    rank_condition_ok=rank + tw == 2,
                                    twist_rank=tw))
        else:
            out.append(HeegnerDatum(D=D, split_ok=True,
                                    rank_condition_ok=True,
                                    twist_rank=None, rank_basis="parity"))
        if sum(1 for d in out if d.rank_condition_ok) >= how_many:
            return [d for d in out if d.rank_condition_ok]
    found = [d for d in out if d.rank_condition_ok]
    if len(found) < how_many:
        raise SearchExhausted(
            f"only {len(found)} Heegner discriminants below {search_bound}")
    return found


def index_divisibility_check(c_odd: int, index_odd: int) \
        -> IndexDivisibility:
    """Does the odd Tamagawa part divide the odd Heegner index part?"""
    ok = index_odd % c_odd == 0
    return IndexDivisibility(c_odd=c_odd, index_odd=index_odd, verdict=ok,
                             quotient=index_odd // c_odd if ok else None)
