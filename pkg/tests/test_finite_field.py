import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fqcover.errors import (
    ConstantPolynomial, DivisionByZeroPoly, FieldMismatch, NonPrimeBase, NotMonic, PolynomialParseError,
)
from fqcover.finite_field import (
    NEG_INF, FqPoly, enumerate_residues, factor_monic, field_from_order, field_make, format_poly,
    irreducibles, is_irreducible, monic_polys, parse_poly, poly_arith, poly_gcd, poly_lcm,
    poly_powmod, prime_power_decompose, reduction_map,
)

F2 = field_make(2)
F3 = field_make(3)
F4 = field_make(2, 2)
F9 = field_make(3, 2)


def P(F, text):
    return parse_poly(F, text)


class TestFieldConfig:
    def test_prime_field_has_no_defining_poly(self):
        assert F2.q == 2 and F2.defining_poly is None

    def test_f4_defining_poly(self):
        # x^2+x+1 is the only irreducible monic quadratic over F_2
        assert F4.defining_poly == (1, 1, 1)

    def test_composite_base(self):
        with pytest.raises(NonPrimeBase):
            field_make(4, 1)

    def test_from_order(self):
        assert field_from_order(9) == F9
        assert field_from_order(7).k == 1
        with pytest.raises(NonPrimeBase):
            field_from_order(12)

    @pytest.mark.parametrize("F", [F2, F3, F4, F9, field_make(5, 2)])
    def test_field_axioms(self, F):
        q = F.q
        for a in range(q):
            assert F.add(a, F.neg(a)) == 0
            if a:
                assert F.mul(a, F.inv(a)) == 1
            for b in range(q):
                assert F.add(a, b) == F.add(b, a)
                assert F.mul(a, b) == F.mul(b, a)
        for a, b, c in itertools.product(range(q), repeat=3):
            assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            F3.inv(0)

    def test_untabled_extension_matches_tables(self):
        # 2^9 = 512 is above the table limit, so this one multiplies by reduction
        F = field_make(2, 9)
        assert F._tables is None
        for a in (1, 3, 100, 511):
            assert F.mul(a, F.inv(a)) == 1

    def test_prime_power_decompose(self):
        assert prime_power_decompose(64) == (2, 6)
        assert prime_power_decompose(73) == (73, 1)
        assert prime_power_decompose(78) is None


class TestPolyArithmetic:
    def test_gcd(self):
        assert poly_gcd(P(F2, "x^2+1"), P(F2, "x+1")) == P(F2, "x+1")

    def test_divmod(self):
        assert divmod(P(F2, "x^2+x"), P(F2, "x")) == (P(F2, "x+1"), F2.zero())

    def test_product_mod3(self):
        assert P(F3, "x^2+2*x+1") * P(F3, "x+1") == P(F3, "x^3+1")

    def test_zero_degree_sentinel(self):
        z = F2.zero()
        assert z.degree is NEG_INF
        assert z.degree < 0
        with pytest.raises(TypeError):
            z.degree + 1

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZeroPoly):
            divmod(F2.x(), F2.zero())

    def test_field_mismatch(self):
        with pytest.raises(FieldMismatch):
            F2.x() + F3.x()

    def test_lcm(self):
        assert poly_lcm(P(F2, "x^2+x"), P(F2, "x^2+1")) == P(F2, "x^3+x")

    def test_poly_arith_dispatch(self):
        a, b = P(F3, "x^2+1"), P(F3, "x+2")
        assert poly_arith(a, b, "mul") == a * b
        assert poly_arith(a, b, "divmod") == divmod(a, b)

    def test_powmod_frobenius(self):
        f = P(F3, "x^2+1")
        assert poly_powmod(F3.x(), 9, f) == F3.x()

    def test_index_roundtrip(self):
        for i in range(81):
            assert FqPoly.from_index(F3, i).index() == i
        assert P(F2, "x+1").index() == 3

    def test_monic_and_scale(self):
        f = P(F3, "2*x^2+1")
        assert not f.is_monic()
        assert f.monic() == P(F3, "x^2+2")


polys2 = st.lists(st.integers(0, 1), max_size=7).map(lambda cs: FqPoly(F2, cs))
polys9 = st.lists(st.integers(0, 8), max_size=5).map(lambda cs: FqPoly(F9, cs))


@settings(max_examples=150, deadline=None)
@given(st.one_of(st.tuples(polys2, polys2, polys2), st.tuples(polys9, polys9, polys9)))
def test_ring_axioms(abc):
    a, b, c = abc
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == a.field.zero()


@settings(max_examples=150, deadline=None)
@given(st.one_of(st.tuples(polys2, polys2), st.tuples(polys9, polys9)))
def test_division_identity(ab):
    a, b = ab
    if not b:
        return
    quo, rem = divmod(a, b)
    assert quo * b + rem == a
    assert rem.degree < b.degree


class TestIrreducibility:
    def test_small_cases(self):
        assert is_irreducible(P(F2, "x^2+x+1"))
        assert not is_irreducible(P(F2, "x^2+1"))
        assert is_irreducible(P(F2, "x^3+x+1"))

    def test_requires_monic(self):
        with pytest.raises(NotMonic):
            is_irreducible(P(F3, "2*x+1"))

    def test_requires_positive_degree(self):
        with pytest.raises(ConstantPolynomial):
            is_irreducible(F3.one())

    @pytest.mark.parametrize("F,d", [(F2, 4), (F3, 3), (F4, 2)])
    def test_against_root_and_product_sieve(self, F, d):
        products = set()
        for d1 in range(1, d):
            for a in monic_polys(F, d1):
                for b in monic_polys(F, d - d1):
                    products.add(a * b)
        for f in monic_polys(F, d):
            assert is_irreducible(f) == (f not in products)


class TestFactor:
    def test_examples(self):
        assert factor_monic(P(F2, "x^2+x")) == [(P(F2, "x"), 1), (P(F2, "x+1"), 1)]
        assert factor_monic(P(F2, "x^4+x^2")) == [(P(F2, "x"), 2), (P(F2, "x+1"), 2)]
        assert factor_monic(P(F2, "x^2+x+1")) == [(P(F2, "x^2+x+1"), 1)]

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(0, 2), min_size=1, max_size=6))
    def test_product_reconstructs(self, low):
        f = FqPoly(F3, low + [1])
        if f.degree < 1:
            return
        acc = F3.one()
        for Pi, e in factor_monic(f):
            assert is_irreducible(Pi)
            for _ in range(e):
                acc = acc * Pi
        assert acc == f


class TestResidues:
    def test_enumerate(self):
        assert enumerate_residues(P(F2, "x")) == [F2.zero(), F2.one()]
        assert [str(r) for r in enumerate_residues(P(F2, "x^2"))] == ["0", "1", "x", "x+1"]
        assert len(enumerate_residues(P(F3, "x"))) == 3

    @pytest.mark.parametrize("F,Q,m", [(F2, "x^3+x", "x^2+1"), (F3, "x^3+2*x", "x^2+2"), (F4, "x^2+x", "x+1")])
    def test_reduction_map_matches_mod(self, F, Q, m):
        Q, m = P(F, Q), P(F, m)
        rm = reduction_map(Q, m)
        for i in range(F.q ** Q.degree):
            assert rm[i] == (FqPoly.from_index(F, i) % m).index()

    def test_reduction_map_is_readonly(self):
        rm = reduction_map(P(F2, "x^2"), P(F2, "x"))
        with pytest.raises(ValueError):
            rm[0] = 1


class TestTextFormat:
    @pytest.mark.parametrize("F,text", [(F2, "x^2+x+1"), (F3, "2*x^3+1"), (F4, "[1,1]*x^2+[0,1]"), (F3, "0")])
    def test_roundtrip(self, F, text):
        f = parse_poly(F, text)
        assert parse_poly(F, format_poly(f)) == f

    def test_rejects_garbage(self):
        with pytest.raises(PolynomialParseError):
            parse_poly(F2, "x^^2")

    def test_irreducible_counts_via_iterator(self):
        assert len(list(irreducibles(F2, 4))) == 3
