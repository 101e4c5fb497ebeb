"""Coupled neuromuscular stepping and trajectory recording.

One simulation owns the rod state, the two cables, and a control law.
Each step senses the target, produces per-cable currents (or a direct
couple for the benchmark law), advances the cables, maps voltages to
couples, and advances the rod. The per-step reference implementation lives
here in numpy; long runs delegate to the compiled kernel in _kernel, which
executes the same update order.

Stepping order per dt: sense -> control -> cables -> couples -> rod, with
the rod seeing the freshly updated voltages.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cable import BoundaryCondition, CableParams, CableState, step_cable
from .control import (
    ControlConfig,
    benchmark_couple,
    couple_to_activation_reference,
    reference_tracking_current,
    sensory_feedback_current,
)
from .coupling import muscle_couples
from .diagnostics import (
    DiagnosticsSample,
    lyapunov_neural,
    max_node_speed,
    mechanical_energy,
    reach_status,
    tip_curvature,
)
from .errors import IntegrationError
from .geometry import ArmGeometry, RodState
from .rod import DragModel, NO_DRAG, step_rod, suggest_dt
from .sensing import SensoryReading, sense

LAW_NONE = "none"


@dataclass(frozen=True)
class ReachThresholds:
    """Classification tolerances for the reach status (see diagnostics)."""

    touch_distance_frac: float = 0.01   # of L
    align: float = 0.5                  # |sin alpha(s_bar)|
    speed: float = 0.05                 # max node speed [m/s]


@dataclass
class Trajectory:
    """Recorded output samples of one run."""

    t: list[float] = field(default_factory=list)
    rod: list[RodState] = field(default_factory=list)
    v_top: list[np.ndarray] = field(default_factory=list)
    v_bottom: list[np.ndarray] = field(default_factory=list)
    w_top: list[np.ndarray] = field(default_factory=list)
    w_bottom: list[np.ndarray] = field(default_factory=list)
    i_top: list[np.ndarray] = field(default_factory=list)
    i_bottom: list[np.ndarray] = field(default_factory=list)
    u_net: list[np.ndarray] = field(default_factory=list)
    diagnostics: list[DiagnosticsSample] = field(default_factory=list)

    @property
    def s_bar_over_L(self) -> np.ndarray:
        return np.array([d.s_bar_over_L for d in self.diagnostics])

    @property
    def kappa_tip(self) -> np.ndarray:
        return np.array([d.kappa_tip for d in self.diagnostics])

    @property
    def max_speed(self) -> np.ndarray:
        return np.array([d.max_speed for d in self.diagnostics])

    @property
    def energy(self) -> np.ndarray:
        return np.array([d.energy for d in self.diagnostics])

    def settling_time(self, tol_speed: float) -> float:
        """First sample time after which max speed stays below tol_speed."""
        speeds = self.max_speed
        above = np.nonzero(speeds >= tol_speed)[0]
        if above.size == 0:
            return float(self.t[0])
        if above[-1] == len(speeds) - 1:
            return float("inf")
        return float(self.t[above[-1] + 1])


class CoupledSimulation:
    """Rod + two cables + control law, stepped on a shared dt."""

    def __init__(
        self,
        geometry: ArmGeometry,
        cable_params: CableParams,
        control: ControlConfig | None = None,
        target: np.ndarray | None = None,
        drag: DragModel = NO_DRAG,
        bc_top: BoundaryCondition | None = None,
        bc_bottom: BoundaryCondition | None = None,
        law: str | None = None,
        thresholds: ReachThresholds = ReachThresholds(),
        u_external: np.ndarray | None = None,
        dt: float | None = None,
        neural: bool = True,
    ):
        self.geometry = geometry
        self.cable_params = cable_params
        self.control = control or ControlConfig()
        self.law = law if law is not None else (self.control.law if control else LAW_NONE)
        self.target = np.zeros(2) if target is None else np.asarray(target, dtype=float)
        self.drag = drag
        self.bc_top = bc_top or BoundaryCondition.free()
        self.bc_bottom = bc_bottom or BoundaryCondition.free()
        if self.bc_top.kind != self.bc_bottom.kind:
            raise ValueError("both cables must share the boundary-condition kind")
        self.thresholds = thresholds
        self.u_external = (
            np.zeros(geometry.n + 1) if u_external is None else np.asarray(u_external, float)
        )
        self.neural = neural and self.law != "benchmark"
        self.dt = dt if dt is not None else suggest_dt(
            geometry, cable_params if self.neural else None
        )

        self.rod = RodState.straight(geometry)
        n_nodes = geometry.n + 1
        self.top = CableState.zeros(n_nodes, "top")
        self.bottom = CableState.zeros(n_nodes, "bottom")
        self.i_top = np.zeros(n_nodes)
        self.i_bottom = np.zeros(n_nodes)
        self.u_net = self.u_external.copy()
        self.t = 0.0
        self.steps = 0

    def initialize_from_rest(self, rest) -> None:
        """Start from a rest-state equilibrium (shape and cable fields)."""
        kappa_interior = rest.kappa[1:-1]
        self.rod = RodState.from_curvature(kappa_interior, self.geometry)
        v_top = rest.eq_top(self.geometry.s)
        v_bottom = rest.eq_bottom(self.geometry.s)
        b = self.cable_params.b
        self.top = CableState(V=v_top, W=b * np.maximum(v_top, 0.0), muscle_id="top")
        self.bottom = CableState(
            V=v_bottom, W=b * np.maximum(v_bottom, 0.0), muscle_id="bottom"
        )

    def _controls(self, reading: SensoryReading | None):
        """Current fields (and net couple for the benchmark law) for this step."""
        geom = self.geometry
        cc = self.control
        if self.law == "sensory-feedback":
            return sensory_feedback_current(reading, cc.mu, geom.s)
        if self.law == "reference-tracking":
            u_star = benchmark_couple(reading, cc.mu_star, geom)
            v_bar_top, v_bar_bottom = couple_to_activation_reference(
                u_star, geom, cc.epsilon
            )
            i_top = reference_tracking_current(
                self.top.V, v_bar_top, self.cable_params, cc.beta, cc.epsilon,
                ds=geom.ds, current_cap=cc.current_cap,
            )
            i_bottom = reference_tracking_current(
                self.bottom.V, v_bar_bottom, self.cable_params, cc.beta, cc.epsilon,
                ds=geom.ds, current_cap=cc.current_cap,
            )
            return i_top, i_bottom
        n_nodes = geom.n + 1
        return np.zeros(n_nodes), np.zeros(n_nodes)

    def step(self) -> None:
        """Advance the coupled system one shared dt (numpy reference path)."""
        geom = self.geometry
        needs_sensing = self.law in ("sensory-feedback", "reference-tracking", "benchmark")
        reading = sense(self.rod, self.target) if needs_sensing else None

        if self.law == "benchmark":
            self.u_net = benchmark_couple(reading, self.control.mu_star, geom)
        elif self.neural:
            self.i_top, self.i_bottom = self._controls(reading)
            self.top = step_cable(
                self.top, self.i_top, self.cable_params, self.bc_top, self.dt, geom.ds
            )
            self.bottom = step_cable(
                self.bottom, self.i_bottom, self.cable_params, self.bc_bottom, self.dt, geom.ds
            )
            _, _, u = muscle_couples(self.top.V, self.bottom.V, geom)
            self.u_net = u + self.u_external
        else:
            self.u_net = self.u_external.copy()

        self.rod = step_rod(self.rod, self.u_net, geom, self.dt, self.drag)
        self.t += self.dt
        self.steps += 1

    def sample(self, v_bar_const: np.ndarray | None = None) -> DiagnosticsSample:
        """Diagnostics row for the current state."""
        geom = self.geometry
        reading = sense(self.rod, self.target)
        th = self.thresholds
        lyap = float("nan")
        if v_bar_const is not None:
            lyap = lyapunov_neural(
                self.top.V, self.top.W, v_bar_const, self.cable_params, geom.s
            )
        return DiagnosticsSample(
            t=self.t,
            lyap_neural=lyap,
            energy=mechanical_energy(self.rod, self.u_net, geom),
            kappa_tip=tip_curvature(self.rod),
            s_bar_over_L=reading.s_bar / geom.L,
            reach_status=reach_status(
                reading, self.rod, th.touch_distance_frac * geom.L, th.align, th.speed
            ),
            max_speed=max_node_speed(self.rod),
            dist=reading.dist,
        )

    def run(
        self,
        duration: float,
        cadence: float = 0.01,
        use_kernel: bool = True,
        v_bar_const: np.ndarray | None = None,
    ) -> Trajectory:
        """Integrate for ``duration`` seconds, sampling every ``cadence``.

        The first sample records the initial state. Raises IntegrationError
        with the failing step index if the state leaves the finite range.
        """
        steps_per_sample = max(1, int(round(cadence / self.dt)))
        n_samples = int(round(duration / (steps_per_sample * self.dt)))
        traj = Trajectory()
        self._record(traj, v_bar_const)
        for _ in range(n_samples):
            try:
                if use_kernel:
                    self._advance_kernel(steps_per_sample)
                else:
                    for _ in range(steps_per_sample):
                        self.step()
            except IntegrationError as exc:
                exc.partial = traj
                raise
            if not np.isfinite(self.rod.r[-1]).all() or not np.isfinite(self.rod.theta[-1]):
                exc = IntegrationError(self.steps)
                exc.partial = traj
                raise exc
            self._record(traj, v_bar_const)
        return traj

    def _record(self, traj: Trajectory, v_bar_const: np.ndarray | None) -> None:
        traj.t.append(self.t)
        traj.rod.append(self.rod.copy())
        traj.v_top.append(self.top.V.copy())
        traj.v_bottom.append(self.bottom.V.copy())
        traj.w_top.append(self.top.W.copy())
        traj.w_bottom.append(self.bottom.W.copy())
        traj.i_top.append(self.i_top.copy())
        traj.i_bottom.append(self.i_bottom.copy())
        traj.u_net.append(self.u_net.copy())
        traj.diagnostics.append(self.sample(v_bar_const))

    def _advance_kernel(self, n_steps: int) -> None:
        """Advance n_steps through the compiled kernel (same update order)."""
        from . import _kernel

        _kernel.advance(self, n_steps)
