"""Independent numerical oracles and the runnable validation suites.

The boundary-value oracle discretizes lam^2 V'' = V + b*max(V,0) with
second-order central differences and solves it by damped semismooth Newton
(the rectifier only changes the Jacobian diagonal). A Richardson
extrapolation of the fine and half-resolution solves removes the leading
h^2 error so the oracle can certify closed-form profiles to 1e-6 mV.

Each suite returns a plain dict (name, passed, details) so the harness can
emit them as JSON.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.linalg import solve_banded

from .cable import BoundaryCondition, CableParams, CableState, relax_to_steady, stable_dt
from .equilibrium import solve_voltage_equilibrium
from .errors import ConvergenceError
from .geometry import ArmGeometry, GeometryConfig, RodState, build_arm, reconstruct_shape


def solve_cable_bvp_fd(
    v0: float,
    vL: float,
    params: CableParams,
    L: float,
    n: int = 2000,
    step_tol_mv: float = 1e-10,
    max_iter: int = 100,
) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference solve of the steady cable equation on n intervals.

    Returns (s, V) on the n+1 node grid. Damped semismooth Newton handles
    the rectifier kink; convergence is declared when the Newton update drops
    below step_tol_mv (the residual itself bottoms out at the rounding floor
    of the lam^2/h^2 stencil).
    """
    s = np.linspace(0.0, L, n + 1)
    h = L / n
    V = np.linspace(v0, vL, n + 1)
    lam2 = params.lam**2
    scale = max(abs(v0), abs(vL), 1.0)
    res_floor = 100.0 * np.finfo(float).eps * (lam2 / h**2 + 1.0) * scale

    def residual(Vf: np.ndarray) -> np.ndarray:
        return (
            lam2 * (Vf[2:] - 2.0 * Vf[1:-1] + Vf[:-2]) / h**2
            - Vf[1:-1]
            - params.b * np.maximum(Vf[1:-1], 0.0)
        )

    res = residual(V)
    for _ in range(max_iter):
        norm0 = np.abs(res).max()
        # tridiagonal Jacobian; rectifier active where V > 0
        diag = -2.0 * lam2 / h**2 - 1.0 - params.b * (V[1:-1] > 0.0)
        ab = np.zeros((3, n - 1))
        ab[0, 1:] = lam2 / h**2
        ab[1] = diag
        ab[2, :-1] = lam2 / h**2
        delta = solve_banded((1, 1), ab, -res)
        step = 1.0
        while step > 1e-6:
            V_try = V.copy()
            V_try[1:-1] += step * delta
            res_try = residual(V_try)
            if np.abs(res_try).max() < norm0 or norm0 <= res_floor:
                V, res = V_try, res_try
                break
            step *= 0.5
        if step * np.abs(delta).max() < step_tol_mv:
            return s, V
    norm = float(np.abs(res).max())
    if norm >= res_floor:
        raise ConvergenceError(norm, "BVP Newton stalled")
    return s, V


def solve_cable_bvp_richardson(
    v0: float, vL: float, params: CableParams, L: float, n: int = 2000
) -> tuple[np.ndarray, np.ndarray]:
    """h^2-extrapolated FD solution on the coarse (n/2-interval) node grid."""
    s_f, V_f = solve_cable_bvp_fd(v0, vL, params, L, n)
    s_c, V_c = solve_cable_bvp_fd(v0, vL, params, L, n // 2)
    V_ext = (4.0 * V_f[::2] - V_c) / 3.0
    return s_c, V_ext


def run_cable_sampled(
    V0: np.ndarray,
    W0: np.ndarray,
    params: CableParams,
    bc: BoundaryCondition,
    ds: float,
    duration: float,
    cadence: float,
    I_const: np.ndarray | None = None,
    v_bar: np.ndarray | None = None,
    beta: float = 10.0,
    epsilon: float = 1e-3,
    current_cap: float = 1e4,
    dt: float | None = None,
) -> dict:
    """Integrate one cable and sample (t, V, W) at the given cadence.

    Either a constant current field I_const or a constant tracking
    reference v_bar drives the cable; tracking applies the same current law
    as control.reference_tracking_current every step.
    """
    from . import _kernel
    from .control import second_derivative
    from .coupling import sigma_inv

    if dt is None:
        dt = stable_dt(params, ds)
    n = V0.size - 1
    V = V0.copy()
    W = W0.copy()
    tracking = v_bar is not None
    if tracking:
        v_ref = np.clip(v_bar, epsilon, 1.0 - epsilon)
        V_ref = sigma_inv(v_ref)
        ref_field = beta * V_ref - params.lam**2 * second_derivative(V_ref, ds)
        I_field = np.zeros(n + 1)
    else:
        ref_field = np.zeros(0)
        I_field = np.asarray(I_const, dtype=float)
    steps_per_sample = max(1, int(round(cadence / dt)))
    n_samples = int(round(duration / (steps_per_sample * dt)))
    times = [0.0]
    V_hist = [V.copy()]
    W_hist = [W.copy()]
    for k in range(n_samples):
        _kernel.cable_window(
            V, W, I_field, tracking, ref_field, beta, current_cap,
            n, ds, dt, params.tau, params.tau_adapt, params.lam**2, params.b,
            _kernel.BC_CODES[bc.kind], bc.v0, bc.vL, steps_per_sample,
        )
        times.append((k + 1) * steps_per_sample * dt)
        V_hist.append(V.copy())
        W_hist.append(W.copy())
    return {"t": np.array(times), "V": V_hist, "W": W_hist, "dt": dt}


FIG2B_TOP_BASE = (30.0, 40.0, 50.0, 60.0)
FIG2B_TOP_TIP = (60.0, 80.0, 100.0, 120.0)
FIG2C_ADAPTATION = (0.0, 0.5, 1.0, 1.5, 2.0)
REST_BOTTOM = (40.0, 0.0)
SIGN_CHANGE_CASES = ((10.0, -10.0), (40.0, -20.0))


def equilibrium_oracle_cases(params: CableParams) -> list[tuple[float, float, CableParams]]:
    """All boundary/adaptation combinations the oracle suite certifies."""
    cases: list[tuple[float, float, CableParams]] = []
    p1 = CableParams(tau=params.tau, tau_adapt=params.tau_adapt, lam=params.lam, b=1.0)
    for v0 in FIG2B_TOP_BASE:
        for vL in FIG2B_TOP_TIP:
            cases.append((v0, vL, p1))
    cases.append((REST_BOTTOM[0], REST_BOTTOM[1], p1))
    for b in FIG2C_ADAPTATION:
        pb = CableParams(tau=params.tau, tau_adapt=params.tau_adapt, lam=params.lam, b=b)
        cases.append((40.0, 80.0, pb))
    for v0, vL in SIGN_CHANGE_CASES:
        for b in (0.0, 1.0):
            pb = CableParams(tau=params.tau, tau_adapt=params.tau_adapt, lam=params.lam, b=b)
            cases.append((v0, vL, pb))
    return cases


def suite_bvp_oracle(params: CableParams, L: float, tol_mv: float = 1e-6) -> dict:
    """Closed-form equilibria vs the extrapolated FD oracle, max-norm in mV."""
    t0 = time.perf_counter()
    worst = 0.0
    worst_case = None
    for v0, vL, p in equilibrium_oracle_cases(params):
        eq = solve_voltage_equilibrium(v0, vL, p, L)
        s, V_oracle = solve_cable_bvp_richardson(v0, vL, p, L)
        err = float(np.abs(eq(s) - V_oracle).max())
        if err > worst:
            worst, worst_case = err, (v0, vL, p.b)
    return {
        "name": "bvp-oracle",
        "passed": bool(worst < tol_mv),
        "max_error_mv": worst,
        "worst_case": worst_case,
        "tolerance_mv": tol_mv,
        "runtime_s": time.perf_counter() - t0,
    }


def suite_dynamic_steady(
    params: CableParams, L: float, n: int = 100, tol_mv: float = 1e-5
) -> dict:
    """Cable relaxation vs the FD oracle on the same grid (dual numerical routes).

    The closed form is also compared at its discretization-limited accuracy.
    """
    t0 = time.perf_counter()
    v0, vL = 40.0, 80.0
    ds = L / n
    s = np.linspace(0.0, L, n + 1)
    state = CableState(V=np.linspace(v0, vL, n + 1), W=np.zeros(n + 1))
    bc = BoundaryCondition.fixed(v0, vL)
    result = relax_to_steady(state, np.zeros(n + 1), params, bc, ds, tol=1e-7)
    _, V_fd = solve_cable_bvp_fd(v0, vL, params, L, n)
    err_fd = float(np.abs(result.state.V - V_fd).max())
    eq = solve_voltage_equilibrium(v0, vL, params, L)
    err_closed = float(np.abs(result.state.V - eq(s)).max())
    return {
        "name": "dynamic-steady",
        "passed": bool(err_fd < tol_mv),
        "same_grid_error_mv": err_fd,
        "closed_form_error_mv": err_closed,
        "tolerance_mv": tol_mv,
        "runtime_s": time.perf_counter() - t0,
    }


def fit_decay_constant(s: np.ndarray, V: np.ndarray) -> float:
    """Least-squares slope of log V, returned as a length constant."""
    coeffs = np.polyfit(s, np.log(V), 1)
    return -1.0 / coeffs[0]


def suite_length_constant(params: CableParams, tol_rel: float = 0.01) -> dict:
    """Fitted decay of the equilibrium flank vs lam/sqrt(b+1) for b in {0,1,3}.

    Uses a long domain (10 lam) so a clean single-exponential flank exists,
    and fits well away from both boundaries.
    """
    t0 = time.perf_counter()
    L = 10.0 * params.lam
    results = {}
    worst = 0.0
    for b in (0.0, 1.0, 3.0):
        p = CableParams(tau=params.tau, tau_adapt=params.tau_adapt, lam=params.lam, b=b)
        eq = solve_voltage_equilibrium(40.0, 0.0, p, L)
        lam_hat = params.lam / np.sqrt(1.0 + b)
        window = np.linspace(0.05 * L, 0.4 * L, 200)
        fitted = fit_decay_constant(window, eq(window))
        rel = abs(fitted - lam_hat) / lam_hat
        results[f"b={b}"] = {"fitted": fitted, "expected": lam_hat, "rel_error": rel}
        worst = max(worst, rel)
    return {
        "name": "length-constant",
        "passed": bool(worst < tol_rel),
        "fits": results,
        "max_rel_error": worst,
        "runtime_s": time.perf_counter() - t0,
    }


def suite_static_curvature(scenario=None, tol_rel: float = 0.01) -> dict:
    """Constant couple relaxes the rod to kappa = -u/EI on interior nodes."""
    from .rod import NO_DRAG
    from .simulation import CoupledSimulation

    t0 = time.perf_counter()
    geometry = build_arm(scenario.geometry if scenario else GeometryConfig())
    params = scenario.cable if scenario else CableParams()
    u = 0.15 * geometry.c
    sim = CoupledSimulation(geometry, params, law="none", neural=False,
                            u_external=u, drag=NO_DRAG)
    sim._advance_kernel(int(round(300.0 / sim.dt)))
    target = -u[1:-1] / geometry.EI[1:-1]
    rel = float(np.max(np.abs(sim.rod.kappa - target) / np.abs(target)))
    return {
        "name": "static-curvature",
        "passed": bool(rel < tol_rel),
        "max_rel_error": rel,
        "tolerance": tol_rel,
        "runtime_s": time.perf_counter() - t0,
    }


def suite_energy_decay(scenario=None) -> dict:
    """Released bent rod, no actuation, no drag: energy non-increasing."""
    from .rod import NO_DRAG
    from .simulation import CoupledSimulation

    t0 = time.perf_counter()
    geometry = build_arm(scenario.geometry if scenario else GeometryConfig())
    params = scenario.cable if scenario else CableParams()
    sim = CoupledSimulation(geometry, params, law="none", neural=False, drag=NO_DRAG)
    kappa0 = 20.0 * np.sin(np.pi * geometry.s / geometry.L)[1:-1]
    sim.rod = RodState.from_curvature(kappa0, geometry)
    traj = sim.run(5.0, cadence=0.1)
    energy = traj.energy
    steps_per_sample = int(round(0.1 / sim.dt))
    slack = 1e-10 * energy[0] * steps_per_sample
    increases = int(np.sum(np.diff(energy) > slack))
    return {
        "name": "energy-decay",
        "passed": bool(increases == 0),
        "increases": increases,
        "energy_initial": float(energy[0]),
        "energy_final": float(energy[-1]),
        "runtime_s": time.perf_counter() - t0,
    }


def lyapunov_reference(geometry: ArmGeometry) -> np.ndarray:
    """Smooth in-band constant reference voltage used by the Lyapunov suites."""
    return 40.0 + 0.8 * np.cos(np.pi * geometry.s / geometry.L)


def suite_lyapunov(scenario=None, beta: float = 10.0) -> dict:
    """Tracking with a constant reference: monotone Lyapunov + terminal error."""
    from .coupling import sigma
    from .diagnostics import lyapunov_neural

    t0 = time.perf_counter()
    geometry = build_arm(scenario.geometry if scenario else GeometryConfig())
    params = scenario.cable if scenario else CableParams()
    ds = geometry.ds
    V_bar = lyapunov_reference(geometry)
    v_bar = sigma(V_bar)
    n = geometry.n
    cadence = 0.005
    out = run_cable_sampled(
        np.zeros(n + 1), np.zeros(n + 1), params, BoundaryCondition.free(), ds,
        duration=2.0, cadence=cadence, v_bar=v_bar, beta=beta,
    )
    lyap = np.array(
        [lyapunov_neural(V, W, V_bar, params, geometry.s) for V, W in zip(out["V"], out["W"])]
    )
    steps_per_sample = int(round(cadence / out["dt"]))
    slack = 1e-10 * lyap[:-1] * steps_per_sample
    increases = int(np.sum(np.diff(lyap) > slack))
    terminal_err = float(np.abs(out["V"][-1] - V_bar).max())
    return {
        "name": "lyapunov",
        "passed": bool(increases == 0 and terminal_err < 0.1),
        "increases": increases,
        "terminal_error_mv": terminal_err,
        "lyapunov_initial": float(lyap[0]),
        "lyapunov_final": float(lyap[-1]),
        "runtime_s": time.perf_counter() - t0,
    }


def neural_settling_time(
    params: CableParams, geometry: ArmGeometry, I0: float = 60.0
) -> float:
    """Settling time (to 1% of step response) of the free-free cable mid-node."""
    n = geometry.n
    out = run_cable_sampled(
        np.zeros(n + 1), np.zeros(n + 1), params, BoundaryCondition.free(),
        geometry.ds, duration=2.0, cadence=0.002,
        I_const=np.full(n + 1, I0),
    )
    v_mid = np.array([V[n // 2] for V in out["V"]])
    v_star = I0 / (1.0 + params.b)
    outside = np.nonzero(np.abs(v_mid - v_star) >= 0.01 * v_star)[0]
    if outside.size == 0:
        return 0.0
    if outside[-1] + 1 >= v_mid.size:
        return float("inf")
    return float(out["t"][outside[-1] + 1])


def suite_timescale(scenario=None, min_ratio: float = 10.0) -> dict:
    """Neural settling is at least min_ratio faster than mechanical settling.

    Both settle measures use the same 1%-of-step rule: the cable settles to
    1% of its step response; the arm settles when its max node speed stays
    below 1% of the run's peak speed. The reaching attractor keeps breathing
    above that floor for the whole run, so its settling time is bounded
    below by the last sample that exceeds the floor.
    """
    from .harness import Scenario, build_reaching_sim

    t0 = time.perf_counter()
    scn = scenario or Scenario()
    geometry = build_arm(scn.geometry)
    t_neural = neural_settling_time(scn.cable, geometry)
    sim = build_reaching_sim(scn)
    duration = min(scn.duration, 15.0)
    traj = sim.run(duration, cadence=0.05)
    speeds = traj.max_speed
    floor = 0.01 * speeds.max()
    above = np.nonzero(speeds >= floor)[0]
    if above.size == 0:
        t_mech = 0.0
    elif above[-1] == speeds.size - 1:
        t_mech = float("inf")
    else:
        t_mech = float(traj.t[above[-1] + 1])
    ratio = t_mech / t_neural if t_neural > 0 else float("inf")
    return {
        "name": "timescale",
        "passed": bool(ratio > min_ratio),
        "neural_settling_s": t_neural,
        "mechanical_settling_s": t_mech,
        "ratio": ratio,
        "runtime_s": time.perf_counter() - t0,
    }


def suite_convergence(geometry_config: GeometryConfig | None = None) -> dict:
    """Observed refinement order of the shape reconstruction tip position."""
    t0 = time.perf_counter()
    base = geometry_config or GeometryConfig()
    errors = []
    grids = (base.elements, 2 * base.elements, 4 * base.elements)
    for n in grids:
        cfg = GeometryConfig(
            length=base.length,
            elements=n,
            base_radius=base.base_radius,
            tip_radius=base.tip_radius,
            youngs_modulus=base.youngs_modulus,
            density=base.density,
            damping=base.damping,
        )
        g = build_arm(cfg)
        kappa = 2.0 * np.pi / g.L * np.sin(np.pi * g.s / g.L) ** 2
        _, r = reconstruct_shape(kappa, g)
        # analytic tip position by high-order quadrature of the same field
        s_fine = np.linspace(0.0, g.L, 20001)
        kf = 2.0 * np.pi / g.L * np.sin(np.pi * s_fine / g.L) ** 2
        from scipy.integrate import cumulative_trapezoid

        th = np.concatenate(([0.0], cumulative_trapezoid(kf, s_fine)))
        tip = np.array(
            [np.trapezoid(np.cos(th), s_fine), np.trapezoid(np.sin(th), s_fine)]
        )
        errors.append(float(np.hypot(*(r[-1] - tip))))
    order = float(np.log2(errors[0] / errors[1]))
    order2 = float(np.log2(errors[1] / errors[2]))
    return {
        "name": "convergence",
        "passed": bool(order >= 1.0),
        "tip_errors": errors,
        "observed_orders": [order, order2],
        "runtime_s": time.perf_counter() - t0,
    }
