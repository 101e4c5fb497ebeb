import numpy as np
import pytest

from neuroarm.cable import BoundaryCondition, CableState, stable_dt, step_cable
from neuroarm.control import (
    ControlConfig,
    benchmark_couple,
    couple_to_activation_reference,
    reference_tracking_current,
    second_derivative,
    sensory_feedback_current,
)
from neuroarm.coupling import sigma_inv
from neuroarm.errors import ConfigurationError
from neuroarm.sensing import SensoryReading


def reading_with(alpha: np.ndarray, s_bar: float, ds: float) -> SensoryReading:
    return SensoryReading(
        alpha=alpha, s_bar=s_bar, s_bar_index=int(round(s_bar / ds)),
        dist=1.0, touching=False,
    )


class TestSensoryFeedback:
    def test_aligned_arm_silent(self, arm):
        reading = reading_with(np.zeros(arm.n + 1), arm.L, arm.ds)
        i_top, i_bottom = sensory_feedback_current(reading, 500.0, arm.s)
        assert np.all(i_top == 0.0)
        assert np.all(i_bottom == 0.0)

    def test_positive_bearing_drives_top(self, arm):
        alpha = np.full(arm.n + 1, np.pi / 2.0)
        s_bar = 0.5 * arm.L
        reading = reading_with(alpha, s_bar, arm.ds)
        i_top, i_bottom = sensory_feedback_current(reading, 500.0, arm.s)
        active = arm.s <= s_bar
        assert np.allclose(i_top[active], 500.0)
        assert np.all(i_bottom == 0.0)
        assert np.all(i_top[~active] == 0.0)

    def test_negative_bearing_value(self, arm):
        # I = -mu sin(alpha) = -500 sin(-pi/6) = +250 -> bottom cable
        alpha = np.full(arm.n + 1, -np.pi / 6.0)
        reading = reading_with(alpha, arm.L, arm.ds)
        i_top, i_bottom = sensory_feedback_current(reading, 500.0, arm.s)
        assert np.allclose(i_bottom, 250.0)
        assert np.all(i_top == 0.0)

    def test_complementarity(self, arm):
        rng = np.random.default_rng(5)
        alpha = rng.uniform(-np.pi, np.pi, arm.n + 1)
        reading = reading_with(alpha, 0.7 * arm.L, arm.ds)
        i_top, i_bottom = sensory_feedback_current(reading, 500.0, arm.s)
        assert np.all(i_top * i_bottom == 0.0)
        assert np.all(i_top >= 0.0)
        assert np.all(i_bottom >= 0.0)

    def test_activity_cutoff(self, arm):
        rng = np.random.default_rng(6)
        alpha = rng.uniform(-1.0, 1.0, arm.n + 1)
        s_bar = 0.35 * arm.L
        reading = reading_with(alpha, s_bar, arm.ds)
        i_top, i_bottom = sensory_feedback_current(reading, 500.0, arm.s)
        beyond = arm.s > s_bar
        assert np.all(i_top[beyond] == 0.0)
        assert np.all(i_bottom[beyond] == 0.0)


class TestBenchmarkCouple:
    def test_aligned_silent(self, arm):
        reading = reading_with(np.zeros(arm.n + 1), arm.L, arm.ds)
        assert np.all(benchmark_couple(reading, 0.01, arm) == 0.0)

    def test_direct_evaluation_and_sign(self, arm):
        alpha = np.full(arm.n + 1, np.pi / 2.0)
        reading = reading_with(alpha, arm.L, arm.ds)
        mu_star = 1e-6  # below min(c) so no clipping anywhere
        u = benchmark_couple(reading, mu_star, arm)
        assert np.allclose(u, -mu_star)

    def test_clipped_to_muscle_limit(self, arm):
        alpha = np.full(arm.n + 1, np.pi / 2.0)
        reading = reading_with(alpha, arm.L, arm.ds)
        u = benchmark_couple(reading, 10.0, arm)
        assert np.allclose(u, -arm.c)

    def test_cutoff_beyond_s_bar(self, arm):
        alpha = np.full(arm.n + 1, 0.3)
        reading = reading_with(alpha, 0.4 * arm.L, arm.ds)
        u = benchmark_couple(reading, 0.01, arm)
        assert np.all(u[arm.s > 0.4 * arm.L] == 0.0)


class TestReferenceTracking:
    def test_uniform_center_reference(self, arm, cable_params):
        v_bar = np.full(arm.n + 1, 0.5)
        V = np.zeros(arm.n + 1)
        I = reference_tracking_current(V, v_bar, cable_params, beta=10.0, ds=arm.ds)
        # sigma_inv(0.5) = 40 and its second derivative vanishes
        assert np.allclose(I, 10.0 * 40.0)

    def test_reference_is_closed_loop_fixed_point(self, arm, cable_params):
        # spatially uniform reference: V = sigma_inv(v_bar) must be stationary
        v_bar = np.full(arm.n + 1, 0.42)
        V_bar = sigma_inv(v_bar)
        state = CableState(V=V_bar.copy(), W=cable_params.b * np.maximum(V_bar, 0.0))
        I = reference_tracking_current(state.V, v_bar, cable_params, beta=10.0, ds=arm.ds)
        dt = stable_dt(cable_params, arm.ds)
        out = step_cable(state, I, cable_params, BoundaryCondition.free(), dt, arm.ds)
        assert np.abs(out.V - V_bar).max() < 1e-11
        assert np.abs(out.W - state.W).max() < 1e-11

    def test_large_beta_pulls_toward_reference(self, arm, cable_params):
        v_bar = np.full(arm.n + 1, 0.55)
        V_bar = sigma_inv(v_bar)
        state = CableState(V=np.zeros(arm.n + 1), W=np.zeros(arm.n + 1))
        dt = stable_dt(cable_params, arm.ds)
        err0 = np.abs(state.V - V_bar).max()
        for _ in range(2000):
            I = reference_tracking_current(state.V, v_bar, cable_params, beta=50.0, ds=arm.ds)
            state = step_cable(state, I, cable_params, BoundaryCondition.free(), dt, arm.ds)
        assert np.abs(state.V - V_bar).max() < 0.05 * err0

    def test_current_cap(self, arm, cable_params):
        v_bar = np.zeros(arm.n + 1)
        v_bar[arm.n // 2] = 1.0  # single-node step in the reference
        V = np.zeros(arm.n + 1)
        I = reference_tracking_current(V, v_bar, cable_params, beta=10.0, ds=arm.ds,
                                       current_cap=100.0)
        assert np.abs(I).max() <= 100.0

    def test_requires_grid_spacing(self, arm, cable_params):
        with pytest.raises(ConfigurationError):
            reference_tracking_current(np.zeros(5), np.full(5, 0.5), cable_params, 10.0)


class TestSecondDerivative:
    def test_quadratic_exact_including_ends(self):
        s = np.linspace(0.0, 1.0, 41)
        f = 3.0 * s**2 - 2.0 * s + 1.0
        d2 = second_derivative(f, s[1] - s[0])
        assert np.allclose(d2, 6.0, rtol=1e-9)


class TestCoupleSplit:
    def test_zero_couple_gives_epsilon_pair(self, arm):
        v_top, v_bottom = couple_to_activation_reference(np.zeros(arm.n + 1), arm)
        assert np.allclose(v_top, 1e-3)
        assert np.allclose(v_bottom, 1e-3)

    def test_half_scale_positive(self, arm):
        u = 0.5 * arm.c
        v_top, v_bottom = couple_to_activation_reference(u, arm)
        assert np.allclose(v_bottom, 0.5)
        assert np.allclose(v_top, 1e-3)

    def test_full_negative_saturates_top(self, arm):
        u = -arm.c
        v_top, v_bottom = couple_to_activation_reference(u, arm)
        assert np.allclose(v_top, 1.0 - 1e-3)
        assert np.allclose(v_bottom, 1e-3)

    def test_net_reference_reproduces_couple(self, arm):
        rng = np.random.default_rng(2)
        u = rng.uniform(-0.8, 0.8, arm.n + 1) * arm.c
        v_top, v_bottom = couple_to_activation_reference(u, arm)
        recon = arm.c * (v_bottom - v_top)
        assert np.abs(recon - u).max() < 2e-3 * arm.c.max()


class TestControlConfig:
    @pytest.mark.parametrize("kwargs", [
        {"law": "pid"}, {"mu": 0.0}, {"beta": -1.0}, {"epsilon": 0.7},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            ControlConfig(**kwargs)
