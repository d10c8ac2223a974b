"""Kinetic-ordering parameters, ambiguity coefficients, and the operator identity."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdem import (
    MassProfile,
    OrderingParams,
    ParameterError,
    V1Coefficients,
    v1,
    vanishing_mass_exponent,
    veff_mass_terms,
    verify_operator_identity,
)


class TestPresets:
    def test_preset_values(self):
        assert OrderingParams.bdd().alpha == 0.0
        assert OrderingParams.bdd().beta == -1.0
        assert OrderingParams.bastard().alpha == -1.0
        assert OrderingParams.bastard().beta == 0.0
        assert OrderingParams.zk().alpha == -0.5
        assert OrderingParams.zk().beta == 0.0
        assert OrderingParams.redistributed().alpha == 0.0
        assert OrderingParams.redistributed().beta == -0.5

    def test_gamma_completes_to_minus_one(self):
        for p in [OrderingParams.bdd(), OrderingParams.zk(),
                  OrderingParams.custom(0.3, -0.9)]:
            assert p.alpha + p.beta + p.gamma == pytest.approx(-1.0)

    def test_from_spec(self):
        p = OrderingParams.from_spec({"preset": "zk"})
        assert p.alpha == -0.5
        q = OrderingParams.from_spec({"alpha": 0.1, "beta": -0.7})
        assert q.gamma == pytest.approx(-0.4)
        with pytest.raises(ParameterError):
            OrderingParams.from_spec({"preset": "unknown"})


class TestMassTerms:
    def test_bdd_has_no_mass_terms(self):
        prof = MassProfile.sech_squared(1.3)
        x = np.linspace(-3, 3, 25)
        terms = veff_mass_terms(OrderingParams.bdd(), prof, x)
        assert np.max(np.abs(terms)) == 0.0

    def test_constant_mass_has_no_terms_for_any_ordering(self):
        prof = MassProfile.constant()
        x = np.linspace(-2, 2, 9)
        for p in [OrderingParams.zk(), OrderingParams.custom(0.7, -1.4)]:
            assert np.max(np.abs(veff_mass_terms(p, prof, x))) == 0.0

    def test_zk_sech_squared_is_minus_q2_cosh2(self):
        # worked out by hand: with M = sech^2(qx) the surviving terms
        # collapse to -q^2 cosh^2(qx)
        q = 0.8
        prof = MassProfile.sech_squared(q)
        x = np.linspace(-2, 2, 31)
        expected = -q * q * np.cosh(q * x) ** 2
        got = veff_mass_terms(OrderingParams.zk(), prof, x)
        assert np.allclose(got, expected, rtol=1e-12)

    def test_matches_coefficient_combination_with_fd_mass(self):
        # rebuild the terms from finite-difference mass derivatives
        prof = MassProfile.rational_su11(0.5)
        p = OrderingParams.custom(0.3, -0.9)
        h = 1e-4
        for x in [-1.1, 0.4, 1.8]:
            m = prof.m(x)
            m1 = (prof.m(x + h) - prof.m(x - h)) / (2 * h)
            m2 = (prof.m(x + h) - 2 * m + prof.m(x - h)) / (h * h)
            ca = 0.5 * (p.beta + 1.0)
            cb = p.alpha * (p.alpha + p.beta + 1.0) + p.beta + 1.0
            expected = ca * m2 / m**2 - cb * m1**2 / m**3
            got = float(veff_mass_terms(p, prof, np.array([x]))[0])
            assert got == pytest.approx(expected, rel=1e-6, abs=1e-8)


class TestV1:
    def test_coefficients(self):
        c = V1Coefficients.from_params(OrderingParams.bdd())
        assert c.f == pytest.approx(1.0 / 16.0 - 0.5 + 0.0)  # (1/4)^2 + (1/2)(1)(-1)
        assert c.g == pytest.approx(-0.25)
        c = V1Coefficients.from_params(OrderingParams.zk())
        assert c.g == pytest.approx(0.25)

    def test_vanishes_for_exponential_mass_when_f_equals_g(self):
        p = OrderingParams.custom(0.0, -5.0 / 8.0)
        c = V1Coefficients.from_params(p)
        assert c.f == pytest.approx(c.g)
        prof = MassProfile.exponential(0.9)
        x = np.linspace(-2, 2, 21)
        assert np.max(np.abs(v1(p, prof, x))) < 1e-12

    def test_nonzero_for_exponential_mass_when_f_differs(self):
        prof = MassProfile.exponential(0.9)
        x = np.linspace(-2, 2, 21)
        assert np.max(np.abs(v1(OrderingParams.zk(), prof, x))) > 1e-3

    @given(st.floats(min_value=-3, max_value=3, allow_nan=False))
    def test_duality_at_beta_minus_half(self, alpha):
        # with beta = -1/2 the leading coefficient is (alpha + 1/4)^2,
        # symmetric under alpha -> -(alpha + 1/2)
        a = V1Coefficients.from_params(OrderingParams.custom(alpha, -0.5))
        b = V1Coefficients.from_params(OrderingParams.custom(-(alpha + 0.5), -0.5))
        assert a.f == pytest.approx(b.f, rel=1e-12, abs=1e-12)
        assert a.g == pytest.approx(b.g)


class TestVanishingLaw:
    @pytest.mark.parametrize("params, xi", [
        (OrderingParams.bdd(), -4.0 / 3.0),
        (OrderingParams.bastard(), -4.0 / 5.0),
        (OrderingParams.zk(), -4.0),
    ])
    def test_known_exponents(self, params, xi):
        law = vanishing_mass_exponent(params)
        assert law.xi == pytest.approx(xi, rel=1e-12)

    def test_power_law_mass_really_cancels(self):
        # independent numeric check: v1 for M = x^xi at the predicted xi
        for params in [OrderingParams.bdd(), OrderingParams.zk()]:
            law = vanishing_mass_exponent(params)
            prof = MassProfile.power_law(law.xi)
            x = np.linspace(0.2, 5.0, 30)
            assert np.max(np.abs(v1(params, prof, x))) < 1e-12

    def test_degenerate_g_raises(self):
        with pytest.raises(ParameterError):
            vanishing_mass_exponent(OrderingParams.redistributed())


class TestOperatorIdentity:
    def test_bdd_is_discretely_exact(self):
        # the nested and reduced stencils coincide term by term for this
        # ordering, so the residual is pure roundoff
        prof = MassProfile.sech_squared(1.0)
        x = np.linspace(-4, 4, 801)
        r = verify_operator_identity(OrderingParams.bdd(), prof,
                                     lambda t: np.exp(-0.5 * t * t), x)
        assert r < 1e-10

    @pytest.mark.parametrize("params", [
        OrderingParams.zk(),
        OrderingParams.custom(0.3, -0.9),
    ])
    def test_residual_shrinks_at_second_order(self, params):
        prof = MassProfile.sech_squared(1.0)
        ratios = []
        prev = None
        for n in [401, 801, 1601]:
            x = np.linspace(-4, 4, n)
            r = verify_operator_identity(params, prof,
                                         lambda t: np.exp(-0.5 * t * t), x)
            if prev is not None:
                ratios.append(prev / r)
            prev = r
        for ratio in ratios:
            assert 3.0 < ratio < 5.0

    def test_rejects_nonuniform_grid(self):
        prof = MassProfile.constant()
        x = np.array([0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 2.1, 2.8, 3.6])
        with pytest.raises(ParameterError):
            verify_operator_identity(OrderingParams.bdd(), prof,
                                     lambda t: np.ones_like(t), x)
