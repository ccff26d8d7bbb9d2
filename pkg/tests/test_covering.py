from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from fqcover.covering import (
    Congruence, CoveringInstance, check_cover_exhaustive, format_instance, lcm_modulus, load_instance,
    multiplicity, parse_instance, save_instance,
)
from fqcover.errors import BudgetExceeded, ConstantPolynomial, FqCoverError, InstanceFormatError
from fqcover.finite_field import FqPoly, field_make, monic_polys, parse_poly

F2 = field_make(2)
F3 = field_make(3)
DATA = Path(__file__).parent / "data"


def inst(F, *pairs):
    return CoveringInstance.from_pairs(F, pairs)


def test_lcm():
    assert str(lcm_modulus(inst(F2, ("0", "x"), ("0", "x+1")))) == "x^2+x"
    assert str(lcm_modulus(inst(F2, ("0", "x"), ("0", "x^2")))) == "x^2"
    assert str(lcm_modulus(inst(F2, ("0", "x^2+x"), ("0", "x^2+1")))) == "x^3+x"


def test_multiplicity():
    assert multiplicity(inst(F2, ("0", "x"), ("1", "x"))) == 2
    assert multiplicity(inst(F2, ("0", "x"), ("1", "x^2"))) == 1
    assert multiplicity(inst(F2, ("0", "x"), ("1", "x"), ("0", "x^2"), ("1", "x^2"), ("x", "x^2"))) == 3


def test_cover_examples():
    assert check_cover_exhaustive(inst(F2, ("0", "x"), ("1", "x"))).covers
    r = check_cover_exhaustive(inst(F2, ("0", "x")))
    assert not r.covers and r.witness == F2.one() and r.covered_fraction == Fraction(1, 2)
    r = check_cover_exhaustive(inst(F2, ("0", "x"), ("1", "x+1"), ("x+1", "x^2+x")))
    assert r.covers and r.multiplicity == 1 and r.witness is None


def test_modulus_normalised():
    c = Congruence(parse_poly(F3, "2*x+2"), parse_poly(F3, "2*x+1"))
    assert str(c.modulus) == "x+2"
    assert c.residue.degree < 1


def test_constant_modulus_rejected():
    with pytest.raises(ConstantPolynomial):
        Congruence(F2.zero(), F2.one())


def test_empty_instance_rejected():
    with pytest.raises(FqCoverError):
        CoveringInstance(F2, ())


def test_budget_exceeded_carries_details():
    F = field_make(79)
    big = inst(F, ("0", "x^4+1"), ("1", "x^3+2"))
    with pytest.raises(BudgetExceeded) as exc:
        check_cover_exhaustive(big, budget=10 ** 6)
    assert exc.value.degree == 7 and exc.value.required == 79 ** 7


cong3 = st.lists(
    st.tuples(st.lists(st.integers(0, 2), max_size=3), st.sampled_from(
        [m for d in (1, 2, 3) for m in monic_polys(F3, d)])),
    min_size=1, max_size=5)


@settings(max_examples=80, deadline=None)
@given(cong3)
def test_witness_is_really_uncovered(pairs):
    instance = CoveringInstance(F3, tuple(Congruence(FqPoly(F3, r), m) for r, m in pairs))
    rep = check_cover_exhaustive(instance)
    if rep.covers:
        assert rep.covered_fraction == 1
    else:
        assert not any(c.contains(rep.witness) for c in instance.congruences)
        # a residue shifted by a multiple of Q is still uncovered
        shifted = rep.witness + rep.Q * F3.x()
        assert not any(c.contains(shifted) for c in instance.congruences)


class TestInstanceFiles:
    def test_load_data_file(self):
        instance = load_instance(DATA / "f2_cover3.cov")
        assert len(instance) == 3
        assert check_cover_exhaustive(instance).covers

    def test_roundtrip(self, tmp_path):
        F4 = field_make(2, 2)
        original = inst(F4, ("[0,1]", "x"), ("x+1", "x^2+[1,1]"))
        path = tmp_path / "i.cov"
        save_instance(original, path, comment="extension field")
        assert load_instance(path) == original
        assert format_instance(original).startswith("q=4 k=2")

    def test_errors_carry_line_numbers(self):
        with pytest.raises(InstanceFormatError, match="line 3"):
            parse_instance("q=2\n0 % x\n1 %% x+1\n")
        with pytest.raises(InstanceFormatError, match="line 1"):
            parse_instance("k=1\n0 % x\n")

    def test_comments_and_blank_lines(self):
        instance = parse_instance("# a comment\n\nq=3\n  1 % x  # trailing\n")
        assert len(instance) == 1 and instance.field.q == 3
