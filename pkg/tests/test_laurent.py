from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

import rileyslopes as rs
from rileyslopes.errors import ZeroT
from rileyslopes.laurent import (BivarPoly, Mat2, UPoly, base_matrices,
                                 eval_real, eval_real_with_bound,
                                 eval_unit_circle, word_matrix,
                                 word_matrix_balanced)
from conftest import all_valid_knots


def bp(terms):
    return BivarPoly(terms)


T = BivarPoly.t_power(1)
TINV = BivarPoly.t_power(-1)
U = BivarPoly.u_power(1)
ONE = BivarPoly.one()


small_polys = st.dictionaries(
    st.tuples(st.integers(-4, 4), st.integers(0, 3)),
    st.integers(-9, 9),
    max_size=6,
).map(BivarPoly)


class TestBasePolynomials:
    def test_zero_and_one(self):
        assert BivarPoly.zero().is_zero
        assert BivarPoly.zero().u_degree is None
        assert ONE.u_degree == 0
        assert (ONE - ONE).is_zero

    def test_zero_coefficients_pruned(self):
        p = bp({(1, 0): 1, (0, 1): 0})
        assert len(p) == 1

    def test_negative_u_degree_rejected(self):
        with pytest.raises(ValueError):
            bp({(0, -1): 1})

    def test_pow(self):
        y = T - TINV
        assert y ** 2 == bp({(2, 0): 1, (0, 0): -2, (-2, 0): 1})
        assert y ** 0 == ONE

    def test_partials(self):
        p = bp({(3, 2): 5, (-2, 1): 4, (0, 0): 7})
        assert p.partial_u() == bp({(3, 1): 10, (-2, 0): 4})
        assert p.partial_t() == bp({(2, 2): 15, (-3, 1): -8})
        assert p.t_partial_t() == bp({(3, 2): 15, (-2, 1): -8})

    def test_subs_u(self):
        p = U ** 2 + T * U + ONE
        val = T - TINV
        expected = val * val + T * val + ONE
        assert p.subs_u(val) == expected

    def test_subs_t_inverse(self):
        p = bp({(2, 1): 3, (-1, 0): 4})
        assert p.subs_t_inverse() == bp({(-2, 1): 3, (1, 0): 4})

    def test_at_t_minus_one(self):
        p = bp({(2, 1): 3, (1, 0): 4, (0, 2): -1})
        up = p.at_t_minus_one()
        assert up.coeffs == {1: 3, 0: -4, 2: -1}

    def test_coefficient_of_t(self):
        p = bp({(1, 3): -1, (1, 1): -4, (0, 0): 5})
        assert p.coefficient_of_t(1).coeffs == {3: -1, 1: -4}

    @settings(max_examples=60, deadline=None)
    @given(small_polys, small_polys, small_polys)
    def test_ring_axioms(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a + b == b + a
        assert (a - b) + b == a

    @settings(max_examples=40, deadline=None)
    @given(small_polys, small_polys)
    def test_derivation_product_rule(self, a, b):
        assert (a * b).partial_u() == a.partial_u() * b + a * b.partial_u()
        assert (a * b).partial_t() == a.partial_t() * b + a * b.partial_t()


class TestSerialization:
    def test_canonical_example(self):
        p = bp({(-2, 0): 1})
        assert p.canonical_text() == "t^-2*u^0:1"

    def test_sorted_terms(self):
        p = bp({(1, 0): 2, (-2, 1): 3, (-2, 0): 1})
        assert p.canonical_text() == "t^-2*u^0:1;t^-2*u^1:3;t^1*u^0:2"

    def test_zero(self):
        assert BivarPoly.zero().canonical_text() == "0"
        assert BivarPoly.from_canonical_text("0").is_zero

    @settings(max_examples=50, deadline=None)
    @given(small_polys)
    def test_round_trip(self, p):
        assert BivarPoly.from_canonical_text(p.canonical_text()) == p


class TestUPoly:
    def test_basic(self):
        f = UPoly({0: 1, 2: -3})
        assert f.degree == 2
        assert f.to_list() == [1, 0, -3]
        assert f.eval_fraction(Fraction(2)) == 1 - 12
        assert (-f).coeffs == {0: -1, 2: 3}
        assert f.derivative().coeffs == {1: -6}

    def test_zero(self):
        assert UPoly().degree is None
        assert UPoly().to_list() == []

    def test_mul(self):
        f = UPoly({0: 1, 1: 1})
        assert (f * f).coeffs == {0: 1, 1: 2, 2: 1}
        assert (2 * f).coeffs == {0: 2, 1: 2}
        assert f.times_u().coeffs == {1: 1, 2: 1}


class TestBaseMatrices:
    def test_determinants(self):
        base = base_matrices()
        assert base.c.det() == ONE
        assert base.d.det() == ONE
        # det X = u - (t - 1/t)^2
        y = (T - TINV) ** 2
        assert base.x.det() == U - y

    def test_inverses(self):
        base = base_matrices()
        assert base.c * base.c_inv == Mat2.identity()
        assert base.d * base.d_inv == Mat2.identity()

    def test_intertwining(self):
        base = base_matrices()
        assert (base.x * base.c - base.d * base.x).is_zero
        assert (base.x * base.d - base.c * base.x).is_zero


class TestWordMatrix:
    def test_trefoil_entries(self):
        k = rs.validate_knot(3, 1)
        w = word_matrix(k)
        assert w.a == T * T - U
        assert w.b == TINV
        assert w.c == bp({(-1, 1): -1})
        assert w.d == bp({(-2, 0): 1})

    def test_starred_swaps(self):
        k = rs.validate_knot(3, 1)
        ws = word_matrix(k, starred=True)
        # D*C for the trefoil
        base = base_matrices()
        assert ws == base.d * base.c

    def test_exact_identities_small(self):
        for k in all_valid_knots(9):
            e = rs.entries(k)
            assert (e.Cc + U * e.B).is_zero
            assert e.A * e.Dd - e.B * e.Cc == ONE

    def test_u_zero_upper_triangular(self):
        for k in all_valid_knots(9):
            e = rs.entries(k)
            assert e.Cc.subs_u(BivarPoly.zero()).is_zero

    def test_figure_eight_a_degree(self):
        e = rs.entries(rs.validate_knot(5, 3))
        assert e.A.u_degree == 2

    def test_left_to_right_equals_balanced(self):
        for k in all_valid_knots(13):
            assert word_matrix(k) == word_matrix_balanced(k)

    def test_det_longitude_identity(self, sys113):
        # (t - 1/t) b d + u b^2 - 1 = -d * P exactly
        lhs = (T - TINV) * sys113.B * sys113.Dd + U * sys113.B * sys113.B - ONE
        assert lhs == -(sys113.Dd * sys113.P)

    def test_entries_cached(self):
        k = rs.validate_knot(7, 3)
        assert rs.entries(k) is rs.entries(k)


class TestEval:
    def test_trefoil_value(self, sys31):
        v = eval_real(sys31.P, 2, 0)
        assert abs(v - mp.mpf("3.25")) < mp.mpf("1e-45")

    def test_unit_on_square_locus(self, sys113):
        with mp.workdps(50):
            for t in (mp.mpf("1.37"), mp.mpf("2.5"), mp.mpf("0.61")):
                u = (t - 1 / t) ** 2
                assert abs(eval_real(sys113.P, t, u) - 1) < mp.mpf("1e-40")

    def test_zero_poly(self):
        assert eval_real(BivarPoly.zero(), 2, 3) == 0

    def test_zero_t_rejected(self):
        with pytest.raises(ZeroT):
            eval_real(ONE + T, 0, 1)

    def test_bound_covers_error(self, sys113):
        v30, bound30 = eval_real_with_bound(sys113.P, "1.3", "0.7", dps=30)
        v90 = eval_real(sys113.P, "1.3", "0.7", dps=90)
        assert abs(v30 - v90) <= bound30

    def test_unit_circle_trefoil(self, sys31):
        # P(e^{i th}, u) = 2 cos 2th - 1 - u
        with mp.workdps(60):
            for th, u in ((mp.pi / 3, mp.mpf("0.25")), (mp.mpf("1.1"), mp.mpf(-2))):
                re, im = eval_unit_circle(sys31.P, th, u)
                assert abs(re - (2 * mp.cos(2 * th) - 1 - u)) < mp.mpf("1e-40")
                assert abs(im) < mp.mpf("1e-40")

    def test_unit_circle_right_angle(self, sys31):
        with mp.workdps(60):
            re, im = eval_unit_circle(sys31.P, mp.pi / 2, 0)
            assert abs(re + 3) < mp.mpf("1e-40")
            assert abs(im) < mp.mpf("1e-40")

    def test_unit_circle_real_for_valid_knots(self):
        for k in all_valid_knots(9):
            sys = rs.riley_system(k)
            _, im = eval_unit_circle(sys.P, mp.mpf("0.9"), mp.mpf("2.3"))
            assert abs(im) < mp.mpf("1e-40")

    def test_fraction_input(self, sys31):
        v = eval_real(sys31.P, Fraction(2), Fraction(1, 4))
        assert abs(v - mp.mpf("3.0")) < mp.mpf("1e-45")
