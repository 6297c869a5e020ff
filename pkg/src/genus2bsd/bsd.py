"""Analytic order of the Shafarevich-Tate group, and certification.

The central quantity for a rank-r abelian surface A/Q with Mordell-Weil
generators of regulator Reg, real period volume Omega, torsion order T,
and Tamagawa product c is

    Sha_an = T^2 * L_star / (c * Omega * Reg),

where L_star is L^(r)(A, 1) / r!.  The Jacobians treated here are
principally polarized, so the dual torsion order equals T.

This module assembles that quotient with first-order error propagation,
recognizes the result as a small rational by continued fractions, runs
the rank-0 pipeline on a quadratic twist (the route that bounds Sha over
an imaginary quadratic field by Sha over Q times Sha of the twist, up to
a power of 2), and produces a per-odd-prime certification checklist
stating which primes are covered by computation and which require
descent arguments beyond the scope of this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import sympy

from .curve import CurveModel, tamagawa_number, UnsupportedReduction
from .jacobian import torsion_subgroup
from . import lfunction as lf
from . import periods


class UnrecognizedRational(Exception):
    """No admissible rational within the certified error window."""


class MissingIngestedDatum(Exception):
    """A checklist item needs an externally supplied value."""


MAX_DENOMINATOR = 1000


def recognize_rational(x: float, error: float,
                       max_denominator: int = MAX_DENOMINATOR) -> Fraction:
    """Nearest rational with bounded denominator, certified by the error.

    Recognition refuses to fire when the error window could contain a
    second admissible rational: two distinct rationals with denominators
    <= Q differ by at least 1/Q^2, so the error must stay below half of
    1/(q * Q) for the recognized denominator q.
    """
    r = Fraction(x).limit_denominator(max_denominator)
    gap_half = 1.0 / (2.0 * r.denominator * max_denominator)
    if error > gap_half:
        raise UnrecognizedRational(
            f"error {error:.3e} exceeds half-gap {gap_half:.3e} "
            f"around {r}")
    if abs(x - float(r)) > max(3.0 * error, 1e-13):
        raise UnrecognizedRational(
            f"{x!r} is not within 3*error of any rational with "
            f"denominator <= {max_denominator}")
    return r


@dataclass(frozen=True)
class Measured:
    value: float
    error: float


@dataclass(frozen=True)
class HypothesisChecklist:
    """Inputs to the per-prime Sha[p] = 0 certification.

    Each flag is backed either by a computed artifact (a reducibility
    superset, an image certificate) or by an ingested datum, and the
    per-ideal verdicts name which route applies.
    """
    squarefree_level: bool
    polarization_degree: int
    irreducible: dict           # ideal label -> bool (computed)
    p_not_dividing_index: dict  # ideal label -> bool
    p_not_dividing_local_h1: dict   # ideal label -> bool (ingested)
    two_primary_trivial: Optional[bool]  # ingested
    verdicts: dict              # ideal label -> verdict string


@dataclass(frozen=True)
class BSDReport:
    label: str
    rank: int
    l_star: Measured
    omega: Measured
    regulator: Measured
    regulator_caveat: Optional[str]
    torsion: int
    torsion_dual: int
    tamagawa_product: int
    tamagawa_odd: int
    sha_an_real: float
    sha_an_error: float
    sha_an_rational: Optional[Fraction]
    verdict: str
    notes: tuple = ()
    hypotheses: Optional[HypothesisChecklist] = None


def _is_square_fraction(r: Fraction) -> bool:
    n, d = r.numerator, r.denominator
    return (n >= 0 and math.isqrt(n) ** 2 == n
            and math.isqrt(d) ** 2 == d)


def sha_analytic(label: str, rank: int,
                 l_star: Measured, omega: Measured, regulator: Measured,
                 torsion: int, tamagawa_product: int,
                 regulator_caveat: Optional[str] = None,
                 hypotheses: Optional[HypothesisChecklist] = None,
                 ) -> BSDReport:
    """Assemble Sha_an = T^2 L_star / (c Omega Reg) and recognize it.

    The verdict is "consistent with 1" exactly when the recognized
    rational equals 1.  A recognized non-trivial perfect square is
    reported with a saturation warning: an index-m sublattice of the
    Mordell-Weil group inflates the regulator, hence deflates Sha_an,
    by m^2, which is by far the most common source of square values.
    """
    if torsion <= 0 or tamagawa_product <= 0:
        raise ValueError("torsion and Tamagawa product must be positive")
    value = (torsion ** 2) * l_star.value / (
        tamagawa_product * omega.value * regulator.value)
    rel = 0.0
    for m in (l_star, omega, regulator):
        if m.value == 0.0:
            raise ValueError(f"zero quantity in Sha_an assembly for {label}")
        rel += abs(m.error / m.value)
    error = abs(value) * rel
    notes = []
    rational = None
    try:
        rational = recognize_rational(value, error)
        verdict = ("consistent with 1" if rational == 1
                   else f"Sha_an = {rational}")
        if rational != 1 and _is_square_fraction(rational) \
                and rational != 0:
            notes.append(
                "recognized value is a perfect square; check generator "
                "saturation (an index-m sublattice scales Sha_an by "
                "1/m^2 or m^2) before reading this as nontrivial Sha")
    except UnrecognizedRational as exc:
        verdict = f"unrecognized ({value!r} +- {error:.2e}): {exc}"
    if regulator_caveat:
        notes.append(regulator_caveat)
    return BSDReport(
        label=label, rank=rank, l_star=l_star, omega=omega,
        regulator=regulator, regulator_caveat=regulator_caveat,
        torsion=torsion, torsion_dual=torsion,
        tamagawa_product=tamagawa_product,
        tamagawa_odd=_odd_part(tamagawa_product),
        sha_an_real=value, sha_an_error=error,
        sha_an_rational=rational, verdict=verdict, notes=tuple(notes),
        hypotheses=hypotheses)


def _odd_part(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n


@dataclass(frozen=True)
class TwistRow:
    """Rank-0 pipeline result for the quadratic twist by D."""
    label: str
    D: int
    l_value: Measured
    omega: Measured
    torsion: int
    tamagawa_product: int
    tamagawa_by_prime: dict
    sha_twist_real: float
    sha_twist_error: float
    sha_twist_rational: Optional[Fraction]
    odd_part: Optional[int]
    two_exponent: Optional[int]


def rank1_route(model: CurveModel, D: int, bad_factors: dict,
                eps: float = 1e-8) -> TwistRow:
    """Sha_an of the twist A^D by the rank-0 pipeline.

    Intended for fundamental D < 0 split at every prime of the level,
    where the twist has analytic rank 0 and the product
    Sha_an(A/K) = Sha_an(A/Q) * Sha_an(A^D/Q) * 2^(bounded exponent)
    holds over K = Q(sqrt(D)); consumers compare odd parts exactly and
    report the 2-power separately.
    """
    N = model.level
    if N <= 0:
        raise ValueError("model needs a positive level")
    M = lf.required_m(N * D * D, eps, 1.1)
    ls = lf.coefficients(model, M, bad_factors, level=N, twist_D=D)
    lval = lf.evaluate(ls, 0, eps, 1.1)
    if abs(lval.value) <= 10.0 * lval.error_estimate:
        raise ValueError(
            f"L(A^{D}, 1) = {lval.value:.2e} vanishes within error; "
            "the twist does not have analytic rank 0")
    tw = model.quadratic_twist(D)
    per = periods.real_volume(tw)
    tors = torsion_subgroup(tw).order
    cs = {}
    for p in sorted(set(sympy.primefactors(N))
                    | set(sympy.primefactors(abs(D)))):
        if p == 2:
            continue
        cs[p] = tamagawa_number(tw, p)
    c = math.prod(cs.values())
    value = tors ** 2 * lval.value / (c * per.omega)
    rel = abs(lval.error_estimate / lval.value) + abs(
        per.error_estimate / per.omega)
    error = abs(value) * rel
    rational = None
    odd = None
    two_exp = None
    try:
        rational = recognize_rational(value, error)
        if rational.denominator == 1 and rational > 0:
            n = rational.numerator
            two_exp = 0
            while n % 2 == 0:
                n //= 2
                two_exp += 1
            odd = n
    except UnrecognizedRational:
        pass
    return TwistRow(
        label=model.label or "", D=D,
        l_value=Measured(lval.value, lval.error_estimate),
        omega=Measured(per.omega, per.error_estimate),
        torsion=tors, tamagawa_product=c, tamagawa_by_prime=cs,
        sha_twist_real=value, sha_twist_error=error,
        sha_twist_rational=rational, odd_part=odd, two_exponent=two_exp)


# certification routes, per odd prime ideal of the endomorphism order
CERT_SQUAREFREE = ("Sha[p] = 0 certified: squarefree level, irreducible "
                   "residual representation")
CERT_POLARIZED = ("Sha[p] = 0 certified: principal polarization, "
                  "irreducible residual representation, p prime to the "
                  "Heegner index and to the local H^1 orders")
DEFER_REDUCIBLE = ("needs descent-level argument: residual "
                   "representation reducible at this ideal "
                   "(isogeny descent / Eisenstein / main-conjecture "
                   "input beyond this package)")
DEFER_MISSING = "not certified: missing ingested datum ({})"


def theorem_checklist(level: int, reducible_ideals: list,
                      certified_irreducible: list,
                      heegner_index: int,
                      local_h1_orders: Optional[dict] = None,
                      two_primary_trivial: Optional[bool] = None,
                      polarization_degree: int = 1) -> HypothesisChecklist:
    """Per-odd-ideal verdicts for Sha[p] = 0.

    Two certification routes are supported.  With a squarefree level and
    an irreducible residual representation the vanishing follows without
    further local input.  Otherwise a degree-1 polarization plus
    irreducibility certifies the ideals prime to the Heegner index,
    provided the ingested local H^1 orders at the bad places of K are
    prime to p; missing orders raise MissingIngestedDatum only when that
    route is actually needed.  Reducible ideals are always deferred to
    descent arguments that are out of scope here.
    """
    squarefree = sympy.factorint(level) and all(
        e == 1 for e in sympy.factorint(level).values())
    ideals = list(dict.fromkeys(
        [str(p) for p in reducible_ideals]
        + [str(p) for p in certified_irreducible]))
    irr = {}
    not_index = {}
    not_h1 = {}
    verdicts = {}
    reducible_set = {str(p) for p in reducible_ideals}
    for lab in ideals:
        ell = _residue_characteristic(lab)
        irr[lab] = lab not in reducible_set
        not_index[lab] = heegner_index % ell != 0 if ell else False
        if lab in reducible_set:
            verdicts[lab] = DEFER_REDUCIBLE
            continue
        if squarefree:
            verdicts[lab] = CERT_SQUAREFREE
            continue
        if polarization_degree != 1 or not not_index[lab]:
            verdicts[lab] = DEFER_MISSING.format(
                "no certification route applies")
            continue
        if local_h1_orders is None:
            raise MissingIngestedDatum(
                f"local H^1 orders needed to certify {lab} at "
                f"non-squarefree level {level}")
        not_h1[lab] = all(o % ell != 0 for o in local_h1_orders.values())
        verdicts[lab] = (CERT_POLARIZED if not_h1[lab]
                         else DEFER_MISSING.format(
                             f"local H^1 order divisible by {ell}"))
    return HypothesisChecklist(
        squarefree_level=bool(squarefree),
        polarization_degree=polarization_degree,
        irreducible=irr,
        p_not_dividing_index=not_index,
        p_not_dividing_local_h1=not_h1,
        two_primary_trivial=two_primary_trivial,
        verdicts=verdicts)


def _residue_characteristic(ideal_label: str) -> int:
    """Rational prime under an ideal label like "11_1", "sqrt(5)", "(7)"."""
    s = ideal_label.strip()
    if s.startswith("sqrt(") and s.endswith(")"):
        return int(s[5:-1])
    if s.startswith("(") and s.endswith(")"):
        return int(s[1:-1])
    return int(s.split("_")[0])
