import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nadphase import engine
from nadphase.rotating import (
    DegenerateSplittingError,
    exact_S,
    exact_rho,
    exact_state,
    propagate_exact,
    solve_rotating_frame,
)
from nadphase.sweep import dimensionless_params

THETA60 = math.radians(60.0)
TAU_REF = 2 * math.pi / 0.3
S_REF = 0.91595294376772288 + 0.39983029734060948j


class TestRotatingFrame:
    def test_static_limit(self):
        sol = solve_rotating_frame(0.0, 1.1)
        assert sol.theta_bar == pytest.approx(1.1, abs=1e-15)
        assert sol.Delta_theta == pytest.approx(0.0, abs=1e-15)
        assert sol.a_plus == pytest.approx(0.0, abs=1e-15)
        assert sol.a_minus == pytest.approx(1.0, abs=1e-15)

    def test_reference_geometry(self):
        sol = solve_rotating_frame(0.3, THETA60)
        assert math.tan(sol.theta_bar) == pytest.approx(0.86602540378444 / 0.2, rel=1e-12)
        assert sol.theta_bar == pytest.approx(1.3438352477532259, abs=1e-12)
        assert sol.g == pytest.approx(0.95632471578712032, abs=1e-12)
        d, e, _ = dimensionless_params(0.3, THETA60)
        assert sol.g == pytest.approx(d / e, abs=1e-12)

    def test_fast_drive_tips_backward(self):
        assert solve_rotating_frame(50.0, THETA60).theta_bar > 3.0

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateSplittingError):
            solve_rotating_frame(1.0, 0.0)

    @given(x=st.floats(0.0, 0.95), theta=st.floats(0.01, math.pi - 0.01))
    def test_coefficient_identities(self, x, theta):
        sol = solve_rotating_frame(x, theta)
        assert abs(sol.a_plus**2 + sol.a_minus**2 - 1) <= 1e-14
        d, e, _ = dimensionless_params(x, theta)
        assert abs(math.cos(sol.theta_bar - theta) - d / e) <= 1e-12
        # Rabi frequency from detuning and coupling: Omega0 = sqrt(d^2 + 4C^2)
        assert abs(sol.Omega0 - math.hypot(d, x * math.sin(theta))) <= 1e-14
        assert abs(sol.Omega0 - e) <= 1e-14


class TestExactS:
    def test_tau_zero(self):
        assert exact_S(0.3, THETA60, 0.0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("tau", [0.0, 1.7, 12.0])
    def test_adiabatic_identity(self, tau):
        assert abs(exact_S(0.0, 1.2, tau) - 1.0) <= 1e-14

    def test_reference_value(self):
        assert abs(exact_S(0.3, THETA60, TAU_REF) - S_REF) <= 1e-14

    def test_code_path_equality_with_transition_route(self):
        # the rotating-frame trig sums and the transition-integral route are
        # the same expression; equality at machine precision
        err = 0.0
        for x in (0.05, 0.2, 0.5):
            for theta in (0.5, THETA60, 2.1):
                for tau in np.linspace(0.0, 40.0, 31):
                    err = max(err, abs(exact_S(x, theta, tau)
                                       - engine.closed_form_S(x, theta, tau)))
        assert err <= 1e-15

    @given(x=st.floats(0.0, 0.95), theta=st.floats(0.01, math.pi - 0.01),
           tau=st.floats(0.0, 50.0))
    def test_magnitude_bounded(self, x, theta, tau):
        assert abs(exact_S(x, theta, tau)) <= 1 + 1e-12


class TestExactState:
    def test_initial_condition(self):
        psi = exact_state(0.3, THETA60, 0.0)
        half = THETA60 / 2
        np.testing.assert_allclose(psi, [math.sin(half), -math.cos(half)], atol=1e-15)

    @given(x=st.floats(0.0, 0.95), theta=st.floats(0.01, math.pi - 0.01),
           tau=st.floats(0.0, 50.0))
    def test_norm_preserved(self, x, theta, tau):
        assert abs(np.linalg.norm(exact_state(x, theta, tau)) - 1) <= 1e-12

    def test_persistence_probability_reference(self):
        psi = exact_state(0.3, THETA60, TAU_REF)
        half = THETA60 / 2
        phase = cmath.exp(1j * 0.3 * TAU_REF)
        v_minus_t = np.array([math.sin(half), -math.cos(half) * phase])
        overlap = v_minus_t.conj() @ psi
        assert abs(abs(overlap) ** 2 - 0.99883406186823750) <= 1e-12

    def test_projection_recovers_S(self):
        # <E-(t)|psi(t)> = exp(i gamma_- - i int E-) * S(t)
        x, theta, tau = 0.2, 1.0, 7.0
        psi = exact_state(x, theta, tau)
        half = theta / 2
        v_minus_t = np.array([math.sin(half), -math.cos(half) * cmath.exp(1j * x * tau)])
        overlap = v_minus_t.conj() @ psi
        gamma_minus = -(x * tau / 2) * (1 + math.cos(theta))
        prefactor = cmath.exp(1j * (gamma_minus + tau / 2))
        assert abs(overlap - prefactor * exact_S(x, theta, tau)) <= 1e-12

    def test_propagate_superposition_linearity(self):
        x, theta, tau = 0.25, 1.3, 5.0
        e1 = np.array([1.0, 0.0], dtype=complex)
        e2 = np.array([0.0, 1.0], dtype=complex)
        combo = propagate_exact(x, theta, tau, (e1 + 2j * e2) / math.sqrt(5))
        parts = (propagate_exact(x, theta, tau, e1)
                 + 2j * propagate_exact(x, theta, tau, e2)) / math.sqrt(5)
        np.testing.assert_allclose(combo, parts, atol=1e-14)


class TestExactRho:
    def test_reference_value(self):
        assert abs(exact_rho(0.3, THETA60, TAU_REF) - 0.41158622956069042) <= 1e-9

    def test_zero_at_origin(self):
        assert exact_rho(0.3, THETA60, 0.0) == 0.0
