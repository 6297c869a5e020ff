"""Fixture ingestion, validation, and cross-checking.

Fixture files are line-delimited JSON with a header line carrying the
schema identifier, the row count, and a SHA-256 checksum of the body.
Two fixtures ship with the package:

* ``figure1.jsonl`` - one record per curve for the 28 absolutely simple
  Atkin-Lehner quotient Jacobians: label, level, model, endomorphism
  order discriminant, rank, reducible prime ideals, odd Tamagawa part,
  recomputed per-prime Tamagawa numbers, Heegner (D, index) pairs, bad
  Euler factors, and the proved Sha bound.
* ``figure2.jsonl`` - the 22 rank-2 rows of the twist decomposition:
  Heegner field discriminant and the analytic Sha orders of the twist,
  over the Heegner field, and over Q.

Reference quantities are published table values; the model coefficients
and bad Euler factors are derived artifacts whose provenance each record
names.  ``crosscheck_record`` re-derives everything recomputable and
itemizes disagreements without raising.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import sympy

from .curve import CurveModel
from .numbers import kronecker, is_fundamental_discriminant

SCHEMA_FIGURE1 = "genus2bsd-figure1/1"
SCHEMA_FIGURE2 = "genus2bsd-figure2/1"


class SchemaError(Exception):
    """Malformed fixture line; message names the line and field."""


class ChecksumMismatch(Exception):
    """Fixture body does not match the checksum in its header."""


@dataclass(frozen=True)
class CurveRecord:
    label: str
    display: str
    N: int
    quotient: str
    f: tuple
    h: tuple
    model_provenance: str
    order_disc: int
    rank: int
    sha_an: int
    reducible: tuple
    c_odd: int
    tamagawa: dict            # prime -> order, None where not computed
    tamagawa_unsupported: tuple
    heegner: tuple            # ((D, index), ...); index None if untabulated
    bad_euler: dict           # prime -> Euler factor coefficients
    two_primary_trivial: bool
    sha_proved: str
    torsion: Optional[int] = None
    generators: Optional[tuple] = None
    local_h1: Optional[dict] = None

    def model(self) -> CurveModel:
        return CurveModel(f=self.f, h=self.h, label=self.label,
                          level=self.N)

    def bad_factors(self) -> dict:
        return {int(q): tuple(c) for q, c in self.bad_euler.items()}

    def heegner_D(self) -> int:
        return self.heegner[0][0]

    def heegner_index(self) -> int:
        return self.heegner[0][1]

    def tamagawa_product(self) -> int:
        """Product over the odd primes of the level; None when any
        factor is uncomputed."""
        vals = list(self.tamagawa.values())
        if any(v is None for v in vals):
            return None
        return math.prod(vals)


_FIELD_TYPES_1 = {
    "label": str, "display": str, "N": int, "quotient": str,
    "f": list, "h": list, "model_provenance": str, "order_disc": int,
    "rank": int, "sha_an": int, "reducible": list, "c_odd": int,
    "tamagawa": dict, "tamagawa_unsupported": list, "heegner": list,
    "bad_euler": dict, "two_primary_trivial": bool, "sha_proved": str,
}


def _record_from_obj(obj: dict, line_no: int) -> CurveRecord:
    for name, typ in _FIELD_TYPES_1.items():
        if name not in obj:
            raise SchemaError(f"line {line_no}: missing field '{name}'")
        if not isinstance(obj[name], typ):
            raise SchemaError(
                f"line {line_no}: field '{name}' should be "
                f"{typ.__name__}, got {type(obj[name]).__name__}")
    for poly in ("f", "h"):
        if not all(isinstance(c, int) for c in obj[poly]):
            raise SchemaError(
                f"line {line_no}: field '{poly}' must hold integers")
    heeg = []
    for pair in obj["heegner"]:
        if (not isinstance(pair, list) or len(pair) != 2
                or not isinstance(pair[0], int)
                or not isinstance(pair[1], (int, type(None)))):
            raise SchemaError(
                f"line {line_no}: field 'heegner' entries must be "
                "[discriminant, index] pairs")
        heeg.append((pair[0], pair[1]))
    return CurveRecord(
        label=obj["label"], display=obj["display"], N=obj["N"],
        quotient=obj["quotient"], f=tuple(obj["f"]), h=tuple(obj["h"]),
        model_provenance=obj["model_provenance"],
        order_disc=obj["order_disc"], rank=obj["rank"],
        sha_an=obj["sha_an"], reducible=tuple(obj["reducible"]),
        c_odd=obj["c_odd"],
        tamagawa={int(p): v for p, v in obj["tamagawa"].items()},
        tamagawa_unsupported=tuple(obj["tamagawa_unsupported"]),
        heegner=tuple(heeg),
        bad_euler={int(q): tuple(c) for q, c in obj["bad_euler"].items()},
        two_primary_trivial=obj["two_primary_trivial"],
        sha_proved=obj["sha_proved"],
        torsion=obj.get("torsion"),
        generators=(tuple(obj["generators"])
                    if obj.get("generators") else None),
        local_h1=obj.get("local_h1"))


@dataclass(frozen=True)
class TwistRecord:
    label: str
    D_K: int
    alt_discriminant: bool
    sha_twist: int
    sha_over_K: int
    sha_over_Q: int


def _twist_from_obj(obj: dict, line_no: int) -> TwistRecord:
    fields = {"label": str, "D_K": int, "alt_discriminant": bool,
              "sha_twist": int, "sha_over_K": int, "sha_over_Q": int}
    for name, typ in fields.items():
        if name not in obj:
            raise SchemaError(f"line {line_no}: missing field '{name}'")
        if not isinstance(obj[name], typ):
            raise SchemaError(
                f"line {line_no}: field '{name}' should be "
                f"{typ.__name__}, got {type(obj[name]).__name__}")
    return TwistRecord(**{k: obj[k] for k in fields})


def _read_checked(text: str, path_name: str, schema: str):
    lines = text.splitlines(keepends=True)
    if not lines:
        raise SchemaError(f"{path_name}: empty fixture")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path_name} line 1: bad header ({exc})")
    if header.get("schema") != schema:
        raise SchemaError(
            f"{path_name}: schema {header.get('schema')!r}, "
            f"expected {schema!r}")
    body = "".join(lines[1:])
    digest = hashlib.sha256(body.encode()).hexdigest()
    if digest != header.get("sha256"):
        raise ChecksumMismatch(
            f"{path_name}: body checksum {digest[:12]}... does not "
            f"match header {str(header.get('sha256'))[:12]}...")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rows.append((json.loads(line), i))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path_name} line {i}: {exc}")
    if len(rows) != header.get("rows"):
        raise SchemaError(
            f"{path_name}: {len(rows)} rows, header says "
            f"{header.get('rows')}")
    return rows


def _fixture_text(name: str) -> str:
    return (importlib.resources.files("genus2bsd") / "fixtures"
            / name).read_text()


def load_records(path=None) -> list:
    """Validated figure-1 records; packaged fixture when path is None."""
    if path is None:
        text, name = _fixture_text("figure1.jsonl"), "figure1.jsonl"
    else:
        text, name = open(path).read(), str(path)
    return [_record_from_obj(obj, ln)
            for obj, ln in _read_checked(text, name, SCHEMA_FIGURE1)]


def load_twist_records(path=None) -> list:
    """Validated figure-2 rows; packaged fixture when path is None."""
    if path is None:
        text, name = _fixture_text("figure2.jsonl"), "figure2.jsonl"
    else:
        text, name = open(path).read(), str(path)
    return [_twist_from_obj(obj, ln)
            for obj, ln in _read_checked(text, name, SCHEMA_FIGURE2)]


def emit_records(records) -> str:
    """Inverse of load_records: header + body, byte-stable."""
    rows = []
    for r in records:
        obj = asdict(r)
        obj["f"] = list(r.f)
        obj["h"] = list(r.h)
        obj["reducible"] = list(r.reducible)
        obj["tamagawa"] = {str(p): v for p, v in r.tamagawa.items()}
        obj["tamagawa_unsupported"] = list(r.tamagawa_unsupported)
        obj["heegner"] = [list(pair) for pair in r.heegner]
        obj["bad_euler"] = {str(q): list(c)
                            for q, c in r.bad_euler.items()}
        obj["generators"] = list(r.generators) if r.generators else None
        rows.append(obj)
    body = "".join(json.dumps(o, sort_keys=True, separators=(",", ":"))
                   + "\n" for o in rows)
    digest = hashlib.sha256(body.encode()).hexdigest()
    header = json.dumps({"schema": SCHEMA_FIGURE1, "rows": len(rows),
                         "sha256": digest}, sort_keys=True,
                        separators=(",", ":"))
    return header + "\n" + body


def _odd_part(n: int) -> int:
    while n and n % 2 == 0:
        n //= 2
    return n


def crosscheck_record(record: CurveRecord) -> list:
    """Re-derive recomputable fields; returns diagnostics (no raising)."""
    out = []
    stem = record.label.removeprefix("X0_")
    level_digits = ""
    for ch in stem:
        if not ch.isdigit():
            break
        level_digits += ch
    if level_digits != str(record.N):
        out.append(f"label {record.label} does not encode N={record.N}")
    try:
        model = record.model()
    except ValueError as exc:
        out.append(f"model rejected: {exc}")
        return out
    level_primes = set(sympy.primefactors(record.N))
    disc_primes = set(sympy.primefactors(abs(model.discriminant())))
    if not level_primes <= disc_primes | {2}:
        out.append(
            f"level primes {sorted(level_primes)} not all dividing the "
            f"model discriminant")
    for D, idx in record.heegner:
        if not is_fundamental_discriminant(D):
            out.append(f"D={D} is not a fundamental discriminant")
            continue
        nonsplit = [p for p in level_primes if kronecker(D, p) != 1]
        if nonsplit:
            out.append(
                f"D={D} is not split at {nonsplit} (required for a "
                "Heegner discriminant of this level)")
        if idx is not None and _odd_part(record.c_odd) != record.c_odd:
            out.append(f"c_odd={record.c_odd} is not odd")
        if idx is not None and idx % record.c_odd != 0:
            out.append(
                f"odd Tamagawa part {record.c_odd} does not divide the "
                f"Heegner index {idx}")
    prod = record.tamagawa_product()
    if prod is not None and _odd_part(prod) != record.c_odd:
        out.append(
            f"odd part of recomputed Tamagawa product {prod} is "
            f"{_odd_part(prod)}, tabulated c_odd is {record.c_odd}")
    if record.rank not in (0, 2):
        out.append(f"rank {record.rank} outside the tabulated range")
    return out
