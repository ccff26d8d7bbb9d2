"""Exact-rational distortion method for covering instances over F_q[x].

Residues mod Q are addressed by their canonical index. A measure is stored
densely as one integer numerator per residue over a shared denominator,
so every weight is still an exact rational; the step update and
the moments are evaluated fiber-wise because both the covered fraction and
the previous measure are constant on fibers of the projection mod Q_{j-1}.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .certified import rational_json
from .covering import CoveringInstance, congruence_masks, lcm_modulus
from .errors import InvalidDelta
from .finite_field import DEFAULT_BUDGET, FqPoly, divides, factor_monic, reduction_map, residue_count

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PrimePowerChain:
    """Q = P_1^nu_1 ... P_J^nu_J with |P_1| <= ... <= |P_J| (ties in lex order)."""

    primes: tuple[FqPoly, ...]
    exponents: tuple[int, ...]
    partials: tuple[FqPoly, ...]

    @property
    def J(self) -> int:
        return len(self.primes)

    @property
    def Q(self) -> FqPoly:
        return self.partials[-1]

    def norm(self, j: int) -> int:
        """|P_j| for 1-based j."""
        P = self.primes[j - 1]
        return P.field.q ** P.degree


@functools.lru_cache(maxsize=1024)
def decompose(Q: FqPoly) -> PrimePowerChain:
    factors = factor_monic(Q)
    partials = [Q.field.one()]
    for P, e in factors:
        step = Q.field.one()
        for _ in range(e):
            step = step * P
        partials.append(partials[-1] * step)
    return PrimePowerChain(
        primes=tuple(P for P, _ in factors),
        exponents=tuple(e for _, e in factors),
        partials=tuple(partials),
    )


class DeltaSchedule:
    """Assignment of delta_j in (0, 1/2] to each step of a chain.

    ``steps`` reads deltas positionally; ``degrees`` reads them by the
    degree of P_j. In both cases the last listed value is reused beyond the
    end of the list.
    """

    def __init__(self, values: Sequence, by_degree: bool):
        vals = tuple(Fraction(v) for v in values)
        if not vals:
            raise InvalidDelta("empty delta schedule")
        for v in vals:
            check_delta(v)
        self.values = vals
        self.by_degree = by_degree

    @classmethod
    def uniform(cls, delta=HALF) -> "DeltaSchedule":
        return cls([delta], by_degree=False)

    @classmethod
    def steps(cls, deltas: Sequence) -> "DeltaSchedule":
        return cls(deltas, by_degree=False)

    @classmethod
    def degrees(cls, ts: Sequence) -> "DeltaSchedule":
        return cls(ts, by_degree=True)

    @classmethod
    def default_by_degree(cls) -> "DeltaSchedule":
        return cls([Fraction(17, 100), Fraction(1, 4)], by_degree=True)

    def delta(self, chain: PrimePowerChain, j: int) -> Fraction:
        pos = chain.primes[j - 1].degree if self.by_degree else j
        return self.values[min(pos, len(self.values)) - 1]

    def for_chain(self, chain: PrimePowerChain) -> list[Fraction]:
        return [self.delta(chain, j) for j in range(1, chain.J + 1)]

    def __repr__(self):
        kind = "degrees" if self.by_degree else "steps"
        return f"DeltaSchedule.{kind}([{', '.join(str(v) for v in self.values)}])"


def check_delta(delta) -> Fraction:
    delta = Fraction(delta)
    if not 0 < delta <= HALF:
        raise InvalidDelta(f"delta must lie in (0, 1/2], got {delta}")
    return delta


@dataclass
class CoveredSetBj:
    """Residues mod Q hit by congruences whose modulus first divides Q_j."""

    j: int
    mask: np.ndarray
    congruence_ids: tuple[int, ...] = ()

    @property
    def members(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(self.mask))

    def __len__(self):
        return int(self.mask.sum())


@dataclass
class MeasureState:
    """P_j as integer numerators over one common denominator."""

    j: int
    num: list[int]
    den: int

    @classmethod
    def uniform(cls, n: int) -> "MeasureState":
        return cls(0, [1] * n, n)

    @classmethod
    def from_weights(cls, j: int, weights: Sequence) -> "MeasureState":
        ws = [Fraction(w) for w in weights]
        den = math.lcm(*(w.denominator for w in ws))
        return cls(j, [w.numerator * (den // w.denominator) for w in ws], den)

    @property
    def weights(self) -> list[Fraction]:
        return [Fraction(a, self.den) for a in self.num]

    def total(self) -> Fraction:
        return Fraction(sum(self.num), self.den)


@dataclass
class AlphaProfile:
    """alpha_j per fiber of the projection mod Q_{j-1}.

    ``values[c]`` is the covered fraction of the fiber with class index ``c``;
    ``classes[r]`` is the class index of residue r.
    """

    j: int
    values: dict[int, Fraction]
    classes: np.ndarray
    hits: list[int] | None = None  # covered count per fiber; a cheap key for equal alphas

    def keys(self) -> list:
        if self.hits is not None:
            return self.hits
        return [self.values[c] for c in range(len(self.values))]

    def at(self, r: int) -> Fraction:
        return self.values[int(self.classes[r])]


@dataclass
class StepMoments:
    j: int
    prime: FqPoly
    exponent: int
    delta: Fraction
    M1: Fraction
    M2: Fraction

    @property
    def weighted_term(self) -> Fraction:
        return self.M2 / (4 * self.delta * (1 - self.delta))

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "prime": str(self.prime),
            "exponent": self.exponent,
            "delta": rational_json(self.delta),
            "M1": rational_json(self.M1),
            "M2": rational_json(self.M2),
            "weighted_term": rational_json(self.weighted_term),
        }


@dataclass
class MomentReport:
    steps: list[StepMoments]

    @property
    def weighted_sum(self) -> Fraction:
        return sum((s.weighted_term for s in self.steps), Fraction(0))

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "weighted_sum": rational_json(self.weighted_sum),
        }


@dataclass
class DistortionResult:
    weighted_sum: Fraction
    certified_noncover: bool
    moments: MomentReport
    uncovered_mass: Fraction
    chain: PrimePowerChain
    deltas: list[Fraction]
    final: MeasureState
    covered: np.ndarray
    witness: FqPoly | None = None
    states: list[MeasureState] = field(default_factory=list)

    def to_json(self, trace: bool = False) -> dict:
        out = {
            "Q": str(self.chain.Q),
            "chain": [{"prime": str(P), "exponent": e}
                      for P, e in zip(self.chain.primes, self.chain.exponents)],
            "moments": self.moments.to_json(),
            "weighted_sum": rational_json(self.weighted_sum),
            "certified_noncover": self.certified_noncover,
            "uncovered_mass": rational_json(self.uncovered_mass),
            "witness": None if self.witness is None else str(self.witness),
        }
        if trace:
            F = self.chain.Q.field
            out["trace"] = [
                {"j": s.j,
                 "weights": {str(FqPoly.from_index(F, r)): f"{w.numerator}/{w.denominator}"
                             for r, w in enumerate(s.weights)}}
                for s in self.states]
        return out


# pipeline pieces ------------------------------------------------------------

def projection_classes(chain: PrimePowerChain, j: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Class index mod Q_j of every residue mod Q."""
    Qj = chain.partials[j]
    n = residue_count(chain.Q, budget)
    if Qj.degree == 0:
        return np.zeros(n, dtype=np.int64)
    return reduction_map(chain.Q, Qj, budget)


def build_Bj(instance: CoveringInstance, chain: PrimePowerChain, j: int,
             budget: int = DEFAULT_BUDGET, masks: Sequence[np.ndarray] | None = None) -> CoveredSetBj:
    Qj, Qprev = chain.partials[j], chain.partials[j - 1]
    ids = tuple(
        i for i, c in enumerate(instance.congruences)
        if divides(c.modulus, Qj) and not divides(c.modulus, Qprev))
    n = residue_count(chain.Q, budget)
    mask = np.zeros(n, dtype=bool)
    if ids:
        if masks is None:
            masks = congruence_masks([instance.congruences[i] for i in ids], chain.Q, budget)
            for m in masks:
                mask |= m
        else:
            for i in ids:
                mask |= masks[i]
    return CoveredSetBj(j, mask, ids)


def alpha_profile(state: MeasureState, Bj: CoveredSetBj, chain: PrimePowerChain, j: int,
                  classes: np.ndarray | None = None) -> AlphaProfile:
    if state.j != j - 1:
        raise ValueError(f"measure is at step {state.j}, expected {j - 1}")
    if classes is None:
        classes = projection_classes(chain, j - 1)
    n_classes = chain.Q.field.q ** chain.partials[j - 1].degree
    fiber = len(classes) // n_classes
    hits = np.bincount(classes, weights=Bj.mask.astype(np.int64), minlength=n_classes).astype(np.int64)
    hits = hits.tolist()
    distinct = {h: Fraction(h, fiber) for h in set(hits)}
    values = {c: distinct[h] for c, h in enumerate(hits)}
    return AlphaProfile(j, values, classes, hits)


@functools.lru_cache(maxsize=4096)
def step_factors(alpha: Fraction, delta: Fraction) -> tuple[Fraction, Fraction]:
    """Reweighting factors (non-member, member) for one fiber."""
    if alpha < delta:
        return 1 / (1 - alpha), Fraction(0)
    return (1 / (1 - delta),
            (alpha - delta) / (alpha * (1 - delta)))


def step_measure(state: MeasureState, Bj: CoveredSetBj, alpha: AlphaProfile, delta) -> MeasureState:
    """One distortion step.

    Fibers with alpha < delta drop their covered residues and renormalise;
    otherwise covered residues are scaled by (alpha - delta)/(alpha(1 - delta))
    and the rest by 1/(1 - delta). alpha == delta takes the second branch.
    """
    delta = check_delta(delta)
    if state.j != alpha.j - 1:
        raise ValueError(f"measure is at step {state.j}, alpha is for step {alpha.j}")
    keys = alpha.keys()
    reps = {}
    for c, key in enumerate(keys):
        reps.setdefault(key, c)
    pairs = {key: step_factors(alpha.values[c], delta) for key, c in reps.items()}
    scale = math.lcm(*(f.denominator for pair in pairs.values() for f in pair))
    scaled = {key: (f0.numerator * (scale // f0.denominator), f1.numerator * (scale // f1.denominator))
              for key, (f0, f1) in pairs.items()}
    ints = [scaled[key] for key in keys]
    classes = alpha.classes.tolist()
    member = Bj.mask.tolist()
    num = [a * ints[c][b] for a, c, b in zip(state.num, classes, member)]
    den = state.den * scale
    g = math.gcd(den, *num)
    if g > 1:
        num = [a // g for a in num]
        den //= g
    return MeasureState(state.j + 1, num, den)


def class_masses(state: MeasureState, classes: np.ndarray, n_classes: int) -> list[Fraction]:
    mass = [0] * n_classes
    for a, c in zip(state.num, classes.tolist()):
        mass[c] += a
    return [Fraction(m, state.den) for m in mass]


def moment(state: MeasureState, alpha: AlphaProfile, k: int) -> Fraction:
    """sum over residues of alpha^k * P_{j-1}, evaluated fiber-wise."""
    if k < 1:
        raise ValueError("moment order must be >= 1")
    mass = [0] * len(alpha.values)
    for a, c in zip(state.num, alpha.classes.tolist()):
        mass[c] += a
    if alpha.hits is not None:
        fiber = len(alpha.classes) // len(alpha.values)
        total = sum(h ** k * m for h, m in zip(alpha.hits, mass) if h and m)
        return Fraction(total, fiber ** k * state.den)
    by_key: dict = {}
    rep: dict = {}
    for c, (key, m) in enumerate(zip(alpha.keys(), mass)):
        if m:
            by_key[key] = by_key.get(key, 0) + m
            rep.setdefault(key, c)
    return sum((alpha.values[rep[key]] ** k * m for key, m in by_key.items()), Fraction(0)) / state.den


def distortion_verdict(instance: CoveringInstance, schedule: DeltaSchedule | Sequence,
                       budget: int = DEFAULT_BUDGET, keep_states: bool = False) -> DistortionResult:
    """Run the full pipeline and report the weighted second-moment sum.

    ``certified_noncover`` is true when the sum is below 1, in which case the
    instance provably leaves some residue uncovered.
    """
    if not isinstance(schedule, DeltaSchedule):
        schedule = DeltaSchedule.steps(schedule)
    Q = lcm_modulus(instance)
    n = residue_count(Q, budget)
    chain = decompose(Q)
    deltas = schedule.for_chain(chain)
    masks = congruence_masks(instance.congruences, Q, budget)
    state = MeasureState.uniform(n)
    states = [state] if keep_states else []
    steps = []
    covered = np.zeros(n, dtype=bool)
    for j in range(1, chain.J + 1):
        Bj = build_Bj(instance, chain, j, budget, masks)
        covered |= Bj.mask
        alpha = alpha_profile(state, Bj, chain, j, projection_classes(chain, j - 1, budget))
        M1 = moment(state, alpha, 1)
        M2 = moment(state, alpha, 2)
        steps.append(StepMoments(j, chain.primes[j - 1], chain.exponents[j - 1], deltas[j - 1], M1, M2))
        state = step_measure(state, Bj, alpha, deltas[j - 1])
        if keep_states:
            states.append(state)
    report = MomentReport(steps)
    weighted = report.weighted_sum
    uncovered = [r for r in np.flatnonzero(~covered).tolist() if state.num[r]]
    uncovered_mass = Fraction(sum(state.num[r] for r in uncovered), state.den)
    witness = FqPoly.from_index(instance.field, uncovered[0]) if uncovered else None
    return DistortionResult(
        weighted_sum=weighted,
        certified_noncover=weighted < 1,
        moments=report,
        uncovered_mass=uncovered_mass,
        chain=chain,
        deltas=deltas,
        final=state,
        covered=covered,
        witness=witness,
        states=states,
    )
