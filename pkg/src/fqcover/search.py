"""Budgeted search for covering systems of F_q[x] with distinct moduli.

Finding nothing is not a proof that no cover exists.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .covering import Congruence, CoveringInstance, check_cover_exhaustive, covered_mask
from .errors import BudgetExceeded
from .finite_field import DEFAULT_BUDGET, FieldConfig, FqPoly, monic_polys, poly_lcm, reduction_map
from .prime_tables import count_irreducibles_exact

STRATEGIES = ("greedy_density", "dfs_backtrack")


@dataclass(frozen=True)
class SearchConfig:
    field: FieldConfig
    max_degree: int
    budget: int = 100_000
    strategy: str = "dfs_backtrack"
    residue_budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        if self.budget < 1:
            raise ValueError("node budget must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")


@dataclass(frozen=True)
class SearchResult:
    instance: CoveringInstance | None
    reason: str
    nodes: int

    @property
    def found(self) -> bool:
        return self.instance is not None

    def to_json(self) -> dict:
        return {"found": self.found, "reason": self.reason, "nodes": self.nodes,
                "congruences": [str(c) for c in self.instance.congruences] if self.instance else []}


def greedy_uncovered_density(field: FieldConfig, congruences: Sequence[Congruence]) -> Fraction:
    """Fraction of F_q[x] left uncovered by a partial instance (1 when empty)."""
    if not congruences:
        return Fraction(1)
    mask = covered_mask(CoveringInstance(field, tuple(congruences)))
    return 1 - Fraction(int(mask.sum()), mask.size)


def candidate_moduli(field: FieldConfig, max_degree: int) -> list[FqPoly]:
    return [m for d in range(1, max_degree + 1) for m in monic_polys(field, d)]


class _Budget(Exception):
    pass


def search_distinct_cover(config: SearchConfig) -> SearchResult:
    """Depth-first search: always cover the first uncovered residue next.

    Any cover must hit that residue with some unused modulus, so branching on
    the moduli at that residue is complete up to the node budget. A branch is
    cut when the remaining densities sum to less than the uncovered fraction.
    """
    F = config.field
    D = config.max_degree
    # deg lcm of every monic modulus of degree <= D; checked before building anything
    deg_L = sum(count_irreducibles_exact(F.q, d) * d * (D // d) for d in range(1, D + 1))
    if F.q ** deg_L > config.residue_budget:
        return SearchResult(None, f"residue budget exceeded: {F.q}^{deg_L} residues mod the lcm of all "
                                  f"candidate moduli exceed the budget of {config.residue_budget}", 0)
    moduli = candidate_moduli(F, D)
    L = reduce(poly_lcm, moduli)
    try:
        maps = [reduction_map(L, m, config.residue_budget) for m in moduli]
    except BudgetExceeded as exc:
        return SearchResult(None, f"residue budget exceeded: {exc}", 0)
    n = maps[0].size
    density = [Fraction(1, F.q ** m.degree) for m in moduli]
    nodes = 0

    def dfs(covered: np.ndarray, used: tuple[int, ...]) -> tuple[int, ...] | None:
        nonlocal nodes
        nodes += 1
        if nodes > config.budget:
            raise _Budget
        uncovered = np.flatnonzero(~covered)
        if uncovered.size == 0:
            return used
        remaining = sum((density[i] for i in range(len(moduli)) if i not in used), Fraction(0))
        if remaining < Fraction(int(uncovered.size), n):
            return None
        r0 = int(uncovered[0])
        options = []
        for i in range(len(moduli)):
            if i in used:
                continue
            hit = maps[i] == maps[i][r0]
            gain = int((hit & ~covered).sum()) if config.strategy == "greedy_density" else 0
            options.append((-gain, i, hit))
        options.sort(key=lambda o: (o[0], o[1]))
        for _, i, hit in options:
            found = dfs(covered | hit, used + (i,))
            if found is not None:
                return found
        return None

    try:
        chosen = dfs(np.zeros(n, dtype=bool), ())
    except _Budget:
        return SearchResult(None, f"node budget of {config.budget} exhausted", nodes - 1)
    if chosen is None:
        return SearchResult(None, "search space exhausted without a cover", nodes)
    congruences = []
    covered = np.zeros(n, dtype=bool)
    for i in chosen:
        r0 = int(np.flatnonzero(~covered)[0])
        residue = FqPoly.from_index(F, int(maps[i][r0]))
        congruences.append(Congruence(residue, moduli[i]))
        covered |= maps[i] == maps[i][r0]
    instance = CoveringInstance(F, tuple(congruences))
    report = check_cover_exhaustive(instance, config.residue_budget)
    if not report.covers or report.multiplicity != 1:
        raise AssertionError("search produced an instance that fails verification")
    return SearchResult(instance, "found", nodes)
