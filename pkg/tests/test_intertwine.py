"""Intertwining operators, partner potentials, and the sech^2-mass free states."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from pdem import (
    Intertwiner,
    MassProfile,
    ParameterError,
    build_intertwiner,
    free_particle_states,
    legendre,
    partner_potentials,
    verify_intertwining,
)


class TestLegendre:
    def test_low_orders(self):
        p, dp = legendre(0, 0.3)
        assert p == 1.0 and dp == 0.0
        p, dp = legendre(1, 0.3)
        assert p == pytest.approx(0.3) and dp == pytest.approx(1.0)
        p, dp = legendre(2, 0.5)
        assert p == pytest.approx(0.5 * (3 * 0.25 - 1))
        assert dp == pytest.approx(3 * 0.5)

    def test_order_five_against_monomial_expansion(self):
        # P_5(t) = (63 t^5 - 70 t^3 + 15 t) / 8
        t = np.linspace(-1, 1, 21)
        p, dp = legendre(5, t)
        assert np.allclose(p, (63 * t**5 - 70 * t**3 + 15 * t) / 8, atol=1e-14)
        assert np.allclose(dp, (315 * t**4 - 210 * t**2 + 15) / 8, atol=1e-13)

    def test_endpoint_derivative(self):
        # P_n'(+-1) = (+-1)^(n-1) n(n+1)/2
        for n in [1, 2, 3, 6]:
            _, dp = legendre(n, 1.0)
            assert dp == pytest.approx(n * (n + 1) / 2)
            _, dp = legendre(n, -1.0)
            assert dp == pytest.approx((-1) ** (n - 1) * n * (n + 1) / 2)

    @given(st.integers(min_value=0, max_value=12),
           st.floats(min_value=-1, max_value=1, allow_nan=False))
    def test_parity_and_unit_endpoint(self, n, t):
        p_pos, _ = legendre(n, t)
        p_neg, _ = legendre(n, -t)
        assert p_neg == pytest.approx((-1) ** n * p_pos, abs=1e-12)
        p_one, _ = legendre(n, 1.0)
        assert p_one == pytest.approx(1.0)

    def test_rejects_negative_order(self):
        with pytest.raises(ParameterError):
            legendre(-1, 0.0)


class TestFreeParticleStates:
    def test_energies(self):
        for n in range(5):
            st_ = free_particle_states(0.7, n)
            assert st_.energy == pytest.approx(0.49 * n * (n + 1))

    def test_ground_state_closed_form(self):
        st_ = free_particle_states(1.0, 0)
        x = np.linspace(-3, 3, 11)
        assert np.allclose(st_.psi(x), math.sqrt(0.5) / np.cosh(x))
        assert st_.partner is None

    def test_orthonormality(self):
        q = 1.0
        states = [free_particle_states(q, n) for n in range(5)]
        for i, a in enumerate(states):
            for b in states[i:]:
                val, _ = quad(lambda x: a.psi(x) * b.psi(x), -40, 40,
                              limit=200, epsabs=1e-12)
                expected = 1.0 if a.n == b.n else 0.0
                assert val == pytest.approx(expected, abs=1e-8)

    def test_partner_orthonormality(self):
        q = 0.8
        states = [free_particle_states(q, n) for n in range(1, 5)]
        for i, a in enumerate(states):
            for b in states[i:]:
                val, _ = quad(lambda x: a.partner(x) * b.partner(x), -40, 40,
                              limit=200, epsabs=1e-12)
                expected = 1.0 if a.n == b.n else 0.0
                assert val == pytest.approx(expected, abs=1e-8)

    def test_node_counts(self):
        x = np.linspace(-8, 8, 4001)
        for n in range(5):
            vals = free_particle_states(1.0, n).psi(x)
            signs = np.sign(vals[np.abs(vals) > 1e-10])
            flips = int(np.sum(signs[1:] != signs[:-1]))
            assert flips == n

    def test_partner_is_lowered_state(self):
        # eta psi_n should be proportional to phi_{n-1}; check against the
        # alpha = -1/2 intertwiner applied by finite differences
        q = 1.0
        prof = MassProfile.sech_squared(q)
        eta = build_intertwiner(-0.5, prof)
        for n in [1, 2, 3]:
            st_ = free_particle_states(q, n)
            mismatches = []
            for npts in [1201, 2401]:
                x = np.linspace(-6, 6, npts)
                h = x[1] - x[0]
                eta_psi = eta.apply(st_.psi(x), h, x)
                phi = st_.partner(x[1:-1])
                # project out the scale, then compare shapes
                scale = np.dot(eta_psi, phi) / np.dot(phi, phi)
                assert abs(scale) > 0.1
                mismatches.append(np.max(np.abs(eta_psi - scale * phi)))
            # the mismatch is pure differencing error: small and O(h^2)
            assert mismatches[1] < 5e-4
            assert 3.5 < mismatches[0] / mismatches[1] < 4.5


class TestIntertwiner:
    def test_beta_constraint(self):
        eta = build_intertwiner(0.3, MassProfile.constant())
        assert eta.beta == pytest.approx(-1.6)

    def test_constant_mass_coefficients(self):
        eta = build_intertwiner(0.7, MassProfile.constant())
        x = np.linspace(-2, 2, 9)
        assert np.allclose(eta.a_coef(x), 1.0)
        assert np.max(np.abs(eta.b_coef(x))) == 0.0

    def test_alpha_zero_is_plain_derivative(self):
        eta = build_intertwiner(0.0, MassProfile.sech_squared(1.0))
        x = np.linspace(-2, 2, 9)
        assert np.max(np.abs(eta.b_coef(x))) == 0.0

    def test_restriction_matches_partner_potential(self):
        # the first-order restriction lambda0 + B^2 - (AB)' must reproduce
        # the V_eff member of the partner pair at matching lambda0 = V0
        rng = np.random.default_rng(3)
        prof = MassProfile.sech_squared(0.9)
        for _ in range(20):
            alpha = float(rng.uniform(-2, 2))
            v0 = float(rng.uniform(-1, 1))
            x = rng.uniform(-3, 3, size=10)
            eta = build_intertwiner(alpha, prof, lambda0=v0)
            veff, _ = partner_potentials(alpha, prof, v0, x)
            assert np.allclose(eta.veff_from_restriction(x), veff, atol=1e-10)

    def test_partner_pair_swaps_under_alpha_reflection(self):
        prof = MassProfile.rational_su11(0.5)
        x = np.linspace(-2, 2, 17)
        for alpha in [-1.2, -0.25, 0.6]:
            veff, v1eff = partner_potentials(alpha, prof, 0.3, x)
            veff_r, v1eff_r = partner_potentials(-(alpha + 0.5), prof, 0.3, x)
            assert np.allclose(veff, v1eff_r, atol=1e-12)
            assert np.allclose(v1eff, veff_r, atol=1e-12)


class TestVerifyIntertwining:
    def _residual(self, n):
        prof = MassProfile.sech_squared(1.0)
        alpha = -0.5
        eta = build_intertwiner(alpha, prof, lambda0=0.0)
        x = np.linspace(-8, 8, n)

        def veff_fn(t):
            return partner_potentials(alpha, prof, 0.0, t)[0]

        def v1eff_fn(t):
            return partner_potentials(alpha, prof, 0.0, t)[1]

        return verify_intertwining(eta, veff_fn, v1eff_fn,
                                   lambda t: np.exp(-0.5 * t * t), x)

    def test_residual_is_second_order(self):
        r1 = self._residual(1001)
        r2 = self._residual(2001)
        assert 3.5 < r1 / r2 < 4.5

    def test_constant_mass_residual_is_roundoff(self):
        prof = MassProfile.constant()
        eta = build_intertwiner(0.0, prof, lambda0=0.0)
        x = np.linspace(-6, 6, 1201)
        r = verify_intertwining(eta, lambda t: np.zeros_like(t),
                                lambda t: np.zeros_like(t),
                                lambda t: np.exp(-0.5 * t * t), x)
        assert r < 1e-9
