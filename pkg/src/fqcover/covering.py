"""Covering instances over F_q[x] and exhaustive coverage checks."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .certified import rational_json
from .errors import (
    ConstantPolynomial,
    FieldMismatch,
    FqCoverError,
    InstanceFormatError,
)
from .finite_field import (
    DEFAULT_BUDGET,
    FieldConfig,
    FqPoly,
    field_from_order,
    parse_poly,
    poly_lcm,
    reduction_map,
    residue_count,
)


@dataclass(frozen=True)
class Congruence:
    """The class ``residue + (modulus)``; stored with a monic modulus and reduced residue."""

    residue: FqPoly
    modulus: FqPoly

    def __post_init__(self):
        if self.residue.field != self.modulus.field:
            raise FieldMismatch("residue and modulus live in different fields")
        if not self.modulus or self.modulus.degree < 1:
            raise ConstantPolynomial(f"modulus must have degree >= 1, got {self.modulus}")
        m = self.modulus.monic()
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "residue", self.residue % m)

    def contains(self, r: FqPoly) -> bool:
        return (r - self.residue) % self.modulus == r.field.zero()

    def __str__(self):
        return f"{self.residue} % {self.modulus}"


@dataclass(frozen=True)
class CoveringInstance:
    field: FieldConfig
    congruences: tuple[Congruence, ...]

    def __post_init__(self):
        object.__setattr__(self, "congruences", tuple(self.congruences))
        if not self.congruences:
            raise FqCoverError("a covering instance needs at least one congruence")
        for c in self.congruences:
            if c.modulus.field != self.field:
                raise FieldMismatch(f"congruence {c} is not over {self.field}")

    @classmethod
    def from_pairs(cls, field: FieldConfig, pairs: Iterable[tuple]) -> "CoveringInstance":
        """Build from (residue, modulus) pairs given as FqPoly or text."""
        cong = []
        for r, m in pairs:
            if isinstance(r, str):
                r = parse_poly(field, r)
            if isinstance(m, str):
                m = parse_poly(field, m)
            cong.append(Congruence(r, m))
        return cls(field, tuple(cong))

    def __len__(self):
        return len(self.congruences)


@dataclass(frozen=True)
class CoverReport:
    covers: bool
    witness: FqPoly | None
    multiplicity: int
    covered_fraction: Fraction
    Q: FqPoly

    def to_json(self) -> dict:
        return {
            "covers": self.covers,
            "witness": None if self.witness is None else str(self.witness),
            "multiplicity": self.multiplicity,
            "covered_fraction": rational_json(self.covered_fraction),
            "Q": str(self.Q),
        }


def lcm_modulus(instance: CoveringInstance) -> FqPoly:
    return reduce(poly_lcm, (c.modulus for c in instance.congruences))


def multiplicity(instance: CoveringInstance) -> int:
    return max(Counter(c.modulus for c in instance.congruences).values())


def congruence_masks(congruences: Sequence[Congruence], Q: FqPoly,
                     budget: int = DEFAULT_BUDGET) -> list[np.ndarray]:
    """Boolean membership array over residues mod Q for each congruence.

    Every modulus must divide Q.
    """
    maps: dict[FqPoly, np.ndarray] = {}
    out = []
    for c in congruences:
        rm = maps.get(c.modulus)
        if rm is None:
            rm = maps[c.modulus] = reduction_map(Q, c.modulus, budget)
        out.append(rm == c.residue.index())
    return out


def covered_mask(instance: CoveringInstance, Q: FqPoly | None = None,
                 budget: int = DEFAULT_BUDGET) -> np.ndarray:
    if Q is None:
        Q = lcm_modulus(instance)
    mask = np.zeros(residue_count(Q, budget), dtype=bool)
    for m in congruence_masks(instance.congruences, Q, budget):
        mask |= m
    return mask


def check_cover_exhaustive(instance: CoveringInstance, budget: int = DEFAULT_BUDGET) -> CoverReport:
    """Decide coverage by testing every residue mod lcm of the moduli.

    Raises BudgetExceeded (carrying deg Q and the required count) when there
    are more than ``budget`` residues.
    """
    Q = lcm_modulus(instance)
    mask = covered_mask(instance, Q, budget)
    n_covered = int(mask.sum())
    total = mask.size
    uncovered = np.flatnonzero(~mask)
    witness = FqPoly.from_index(instance.field, int(uncovered[0])) if uncovered.size else None
    return CoverReport(
        covers=witness is None,
        witness=witness,
        multiplicity=multiplicity(instance),
        covered_fraction=Fraction(n_covered, total),
        Q=Q,
    )


# instance files ------------------------------------------------------------

def parse_instance(text: str) -> CoveringInstance:
    """Parse the ``q=<int> k=<int>`` header plus ``residue % modulus`` lines."""
    field = None
    congruences = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if field is None:
            field = _parse_header(line, lineno)
            continue
        if "%" not in line:
            raise InstanceFormatError(f"expected 'residue % modulus', got {line!r}", lineno)
        left, right = (s.strip() for s in line.split("%", 1))
        try:
            congruences.append(Congruence(parse_poly(field, left), parse_poly(field, right)))
        except FqCoverError as exc:
            raise InstanceFormatError(str(exc), lineno) from exc
    if field is None:
        raise InstanceFormatError("missing 'q=<int> k=<int>' header")
    if not congruences:
        raise InstanceFormatError("instance has no congruences")
    return CoveringInstance(field, tuple(congruences))


def _parse_header(line: str, lineno: int) -> FieldConfig:
    values = {}
    for tok in line.split():
        key, sep, val = tok.partition("=")
        if not sep or key not in ("q", "k"):
            raise InstanceFormatError(f"bad header token {tok!r}; expected q=<int> k=<int>", lineno)
        try:
            values[key] = int(val)
        except ValueError:
            raise InstanceFormatError(f"header value {val!r} is not an integer", lineno) from None
    if "q" not in values:
        raise InstanceFormatError("header must set q", lineno)
    try:
        return field_from_order(values["q"], values.get("k"))
    except FqCoverError as exc:
        raise InstanceFormatError(str(exc), lineno) from exc


def format_instance(instance: CoveringInstance, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"q={instance.field.q} k={instance.field.k}")
    lines.extend(str(c) for c in instance.congruences)
    return "\n".join(lines) + "\n"


def load_instance(path) -> CoveringInstance:
    return parse_instance(Path(path).read_text())


def save_instance(instance: CoveringInstance, path, comment: str | None = None) -> None:
    Path(path).write_text(format_instance(instance, comment))
