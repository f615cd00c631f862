import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkdvlab.bounds import (
    bound_report,
    proximity_scale,
    proximity_timescale,
    size_lifespan,
    theorem_constants,
)
from gkdvlab.models import PolynomialNonlinearity as P

norms = st.floats(1e-3, 1e3)
coeff_lists = st.lists(st.floats(-5, 5), min_size=1, max_size=6).filter(lambda a: abs(a[-1]) > 1e-6)


class TestConstants:
    @pytest.mark.parametrize("k", [1, 2, 4, 5])
    def test_monomial(self, k):
        c = theorem_constants(P.monomial(k))
        assert c.A_lower == 0.0 and c.B == 0.0
        assert c.A_full == k

    def test_perturbed_kdv(self):
        c = theorem_constants(P((1.0, 0.0, 0.02)))
        assert (c.A_full, c.A_lower, c.B) == (1.0, 1.0, 1.0)

    def test_mkdv(self):
        c = theorem_constants(P((0.0, 1.0)))
        assert (c.A_full, c.A_lower, c.B) == (2.0, 0.0, 0.0)

    @given(coeff_lists)
    def test_ranges_nest(self, coeffs):
        c = theorem_constants(P(tuple(coeffs)))
        assert 0 <= c.A_lower <= c.A_full
        assert c.B <= c.A_lower + 1e-12 or len(coeffs) == 1


class TestTimescales:
    def test_quintic_window(self):
        T = proximity_timescale(0.1551, 0.1551, P.monomial(5), power_form=True)
        assert T == pytest.approx(1 / 0.1551) and T == pytest.approx(6.45, abs=0.01)

    def test_quartic_inverse_square_window(self):
        rep = bound_report(P.monomial(4), 0.8718, 0.8718)
        assert rep.T_window_inverse_square == pytest.approx(1.32, abs=0.01)
        # the power form takes min{||U0||^-4, ||u0||^-1}; both windows are reported
        assert rep.T_tilde_s == pytest.approx(min(0.8718**-4, 0.8718**-1))

    @pytest.mark.parametrize("k", [1, 3, 6])
    def test_unit_norms(self, k):
        assert proximity_timescale(1.0, 1.0, P.monomial(k), power_form=True) == 1.0

    def test_zero_norms_are_unbounded(self):
        assert proximity_timescale(0.0, 0.0, P.monomial(3)) == math.inf
        assert bound_report(P.monomial(3), 0.0, 0.0).to_dict()["T_s"] is None

    @settings(max_examples=100)
    @given(coeff_lists, norms, norms, st.floats(0.1, 10))
    def test_positive_and_linear_in_constant(self, coeffs, u, U, c):
        nl = P(tuple(coeffs))
        base = proximity_timescale(u, U, nl)
        assert base > 0
        assert proximity_timescale(u, U, nl, c_const=c) == pytest.approx(c * base)
        assert base <= 1 / u + 1e-12

    @given(norms, norms, norms)
    def test_monotone_in_data_size(self, u, U, extra):
        nl = P((1.0, 0.0, 0.02))
        assert proximity_timescale(u, U + extra, nl) <= proximity_timescale(u, U, nl)
        assert size_lifespan(U + extra, nl) <= size_lifespan(U, nl)


class TestLifespan:
    def test_monomial(self):
        assert size_lifespan(2.0, P.monomial(3)) == pytest.approx(1 / 8)

    def test_perturbed_kdv(self):
        assert size_lifespan(1.0, P((1.0, 0.0, 0.02))) == pytest.approx(1 / 3)

    def test_kdv(self):
        assert size_lifespan(0.1551, P.monomial(1)) == pytest.approx(6.45, abs=0.01)

    def test_needs_positive_norm(self):
        with pytest.raises(ValueError):
            size_lifespan(0.0, P.monomial(2))


class TestProximityScale:
    def test_quoted_scales(self):
        assert proximity_scale(0.1551, 5) == pytest.approx(0.024, abs=5e-4)
        assert proximity_scale(0.8718, 4) == pytest.approx(0.76, abs=5e-3)

    @given(st.integers(1, 8))
    def test_crossover(self, k):
        assert proximity_scale(1.0, k) == 1.0

    @given(st.floats(0, 10), st.integers(1, 8))
    def test_dominant_power(self, eps, k):
        s = proximity_scale(eps, k)
        assert s == (eps**2 if eps <= 1 else eps ** (k + 1))

    def test_negative(self):
        with pytest.raises(ValueError):
            proximity_scale(-0.1, 2)


def test_report_carries_both_ranges():
    rep = bound_report(P((1.0, 0.0, 0.02)), 2.0, 2.05, epsilon=2.05, s=1, c_const=1.0)
    d = rep.to_dict()
    assert d["A_k"] == 1.0 and d["A_k_lower"] == 1.0 and d["B_k"] == 1.0
    assert d["proximity_scale"] == pytest.approx(2.05**4)
    assert d["lifespan_T"] == pytest.approx(size_lifespan(2.05, P((1.0, 0.0, 0.02)), s=1))
    assert set(d) >= {"T_s", "T_tilde_s", "T_window_inverse_square", "c_sk", "s", "epsilon", "k"}
