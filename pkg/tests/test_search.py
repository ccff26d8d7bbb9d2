from fractions import Fraction

import pytest

from fqcover.covering import Congruence, check_cover_exhaustive
from fqcover.distortion import DeltaSchedule, distortion_verdict
from fqcover.finite_field import field_make, parse_poly
from fqcover.search import (
    SearchConfig, candidate_moduli, greedy_uncovered_density, search_distinct_cover,
)

F2 = field_make(2)


@pytest.mark.parametrize("strategy", ["greedy_density", "dfs_backtrack"])
def test_finds_verified_cover_over_f2(strategy):
    res = search_distinct_cover(SearchConfig(F2, 2, strategy=strategy))
    assert res.found
    rep = check_cover_exhaustive(res.instance)
    assert rep.covers and rep.multiplicity == 1
    for sch in (DeltaSchedule.uniform(), DeltaSchedule.default_by_degree()):
        assert not distortion_verdict(res.instance, sch).certified_noncover


def test_linear_moduli_cannot_cover():
    res = search_distinct_cover(SearchConfig(F2, 1))
    assert not res.found and "exhausted" in res.reason


def test_node_budget_reported():
    res = search_distinct_cover(SearchConfig(field_make(3), 2, budget=50))
    assert not res.found and "node budget" in res.reason


def test_residue_budget_reported():
    res = search_distinct_cover(SearchConfig(field_make(79), 2, budget=10))
    assert not res.found and "residue budget" in res.reason


def test_density():
    assert greedy_uncovered_density(F2, []) == 1
    x = parse_poly(F2, "x")
    assert greedy_uncovered_density(F2, [Congruence(F2.zero(), x)]) == Fraction(1, 2)
    cover = [Congruence(F2.zero(), x), Congruence(F2.one(), parse_poly(F2, "x+1")),
             Congruence(parse_poly(F2, "x+1"), parse_poly(F2, "x^2+x"))]
    assert greedy_uncovered_density(F2, cover) == 0


def test_candidates():
    assert len(candidate_moduli(F2, 2)) == 6


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(F2, 0)
    with pytest.raises(ValueError):
        SearchConfig(F2, 2, strategy="annealing")
