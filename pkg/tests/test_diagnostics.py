import numpy as np
import pytest

from neuroarm.diagnostics import (
    lyapunov_neural,
    mechanical_energy,
    reach_status,
    tip_curvature,
)
from neuroarm.geometry import RodState
from neuroarm.sensing import sense


class TestLyapunovNeural:
    def test_zero_at_equilibrium(self, arm, cable_params):
        V_bar = np.full(arm.n + 1, 35.0)
        W = cable_params.b * np.maximum(V_bar, 0.0)
        assert lyapunov_neural(V_bar, W, V_bar, cable_params, arm.s) == 0.0

    def test_uniform_offset_value(self, arm, cable_params):
        # 0.5 * tau * (1 mV)^2 * L = 0.5 * 0.04 * 1 * 0.2 = 4e-3
        V_bar = np.full(arm.n + 1, 35.0)
        V = V_bar + 1.0
        W = cable_params.b * np.maximum(V_bar, 0.0)
        val = lyapunov_neural(V, W, V_bar, cable_params, arm.s)
        assert val == pytest.approx(4e-3, rel=1e-12)

    def test_non_negative(self, arm, cable_params):
        rng = np.random.default_rng(4)
        for _ in range(10):
            V = rng.uniform(-50, 100, arm.n + 1)
            W = rng.uniform(-20, 80, arm.n + 1)
            V_bar = rng.uniform(-50, 100, arm.n + 1)
            assert lyapunov_neural(V, W, V_bar, cable_params, arm.s) >= 0.0


class TestMechanicalEnergy:
    def test_rest_state_zero(self, arm):
        state = RodState.straight(arm)
        assert mechanical_energy(state, np.zeros(arm.n + 1), arm) == 0.0

    def test_static_minimum_identity(self, arm):
        # completing the square: at kappa = -u/EI the elastic part equals
        # -sum u^2/(2 EI) ds under the same interior-rectangle quadrature
        u = 0.2 * arm.c
        state = RodState.from_curvature(-u[1:-1] / arm.EI[1:-1], arm)
        value = mechanical_energy(state, u, arm)
        oracle = -np.sum(u[1:-1] ** 2 / (2.0 * arm.EI[1:-1]) * arm.ds)
        assert value == pytest.approx(oracle, rel=1e-12)

    def test_kinetic_contribution_positive(self, arm):
        state = RodState.straight(arm)
        state.r_t[:, 1] = 0.1
        assert mechanical_energy(state, np.zeros(arm.n + 1), arm) > 0.0


class TestTipCurvature:
    def test_zero_field(self, arm):
        state = RodState.straight(arm)
        assert tip_curvature(state) == 0.0

    def test_constant_field(self, arm):
        state = RodState.from_curvature(np.full(arm.n - 1, 5.0), arm)
        assert tip_curvature(state) == pytest.approx(5.0, rel=1e-12)

    def test_linear_field_exact(self, arm):
        # kappa = 10 s / L averaged over [0.9 L, L] -> 9.5
        kappa = 10.0 * arm.s / arm.L
        state = RodState.from_curvature(kappa[1:-1], arm)
        assert tip_curvature(state) == pytest.approx(9.5, rel=1e-12)


class TestLyapunovRate:
    def test_exponential_decay_above_rate_threshold(self, arm, cable_params):
        # for beta above (b+1)^2/2 + b + tau/(2 tau_adapt), the Lyapunov
        # value decays at least at rate 1/tau_adapt (20% discretization slack)
        from neuroarm.cable import BoundaryCondition
        from neuroarm.coupling import sigma
        from neuroarm.validation import lyapunov_reference, run_cable_sampled

        beta = 10.0
        b = cable_params.b
        k = 1.0 / cable_params.tau_adapt
        assert beta > (b + 1.0) ** 2 / 2.0 + b + k * cable_params.tau / 2.0
        V_bar = lyapunov_reference(arm)
        out = run_cable_sampled(
            np.zeros(arm.n + 1), np.zeros(arm.n + 1), cable_params,
            BoundaryCondition.free(), arm.ds,
            duration=1.5, cadence=0.01, v_bar=sigma(V_bar), beta=beta,
        )
        lyap = np.array(
            [lyapunov_neural(V, W, V_bar, cable_params, arm.s)
             for V, W in zip(out["V"], out["W"])]
        )
        window = (out["t"] >= 0.2) & (out["t"] <= 1.2)
        slope = np.polyfit(out["t"][window], np.log(lyap[window]), 1)[0]
        assert -slope >= k * (1.0 - 0.2)


class TestReachStatus:
    def test_touching(self, arm):
        state = RodState.straight(arm)
        reading = sense(state, state.r[-1] + np.array([1e-4, 0.0]))
        assert reach_status(reading, state, tol_d=0.01 * arm.L) == "touching"

    def test_pointing(self, arm):
        state = RodState.straight(arm)
        reading = sense(state, np.array([2.0 * arm.L, 0.0]))
        assert reach_status(reading, state, tol_d=0.01 * arm.L) == "pointing"

    def test_moving_arm_not_reached(self, arm):
        state = RodState.straight(arm)
        state.r_t[:, 1] = 1.0
        reading = sense(state, np.array([2.0 * arm.L, 0.0]))
        assert reach_status(reading, state, tol_d=0.01 * arm.L) == "not-reached"

    def test_misaligned_not_reached(self, arm):
        state = RodState.straight(arm)
        reading = sense(state, np.array([0.19, 0.3]))
        assert reach_status(reading, state, tol_d=0.01 * arm.L) == "not-reached"
