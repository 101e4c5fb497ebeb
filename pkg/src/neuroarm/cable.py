"""Excitable neural cables: voltage/adaptation fields on the shared arc grid.

Each longitudinal muscle is driven by one cable. The voltage field diffuses
with length constant lambda and relaxes on time constant tau; the adaptation
field tracks rectified voltage on the slower tau_adapt and feeds back as
self-inhibition with strength b. Boundary conditions are either fixed-fixed
(rest state) or free-free (motile state, zero end slope via ghost nodes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ConvergenceError, IntegrationError


@dataclass(frozen=True)
class CableParams:
    """Cable equation constants. Defaults are the reference neuron model."""

    tau: float = 0.04         # voltage time constant [s]
    tau_adapt: float = 0.4    # adaptation rate [s]
    lam: float = 0.1          # length constant [m]
    b: float = 1.0            # adaptation strength [-]

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigurationError("tau", f"must be positive, got {self.tau}")
        if not self.tau_adapt > 0:
            raise ConfigurationError("tau_adapt", f"must be positive, got {self.tau_adapt}")
        if not self.lam > 0:
            raise ConfigurationError("lam", f"must be positive, got {self.lam}")
        if self.b < 0:
            raise ConfigurationError("b", f"must be non-negative, got {self.b}")


@dataclass(frozen=True)
class BoundaryCondition:
    """Voltage boundary condition: exactly one kind active per run phase."""

    kind: str               # "fixed-fixed" | "free-free"
    v0: float = 0.0         # base voltage [mV], fixed-fixed only
    vL: float = 0.0         # tip voltage [mV], fixed-fixed only

    @classmethod
    def fixed(cls, v0: float, vL: float) -> "BoundaryCondition":
        return cls(kind="fixed-fixed", v0=float(v0), vL=float(vL))

    @classmethod
    def free(cls) -> "BoundaryCondition":
        return cls(kind="free-free")


@dataclass
class CableState:
    """Voltage and adaptation fields [mV] for one muscle's cable."""

    V: np.ndarray
    W: np.ndarray
    muscle_id: str = "top"   # "top" | "bottom"

    @classmethod
    def zeros(cls, n_nodes: int, muscle_id: str = "top") -> "CableState":
        return cls(V=np.zeros(n_nodes), W=np.zeros(n_nodes), muscle_id=muscle_id)

    def copy(self) -> "CableState":
        return CableState(V=self.V.copy(), W=self.W.copy(), muscle_id=self.muscle_id)


def laplacian(V: np.ndarray, ds: float, bc: BoundaryCondition) -> np.ndarray:
    """Second spatial difference of V under the given boundary condition.

    Free-free uses ghost nodes mirroring the first interior node (zero end
    slope). Fixed-fixed endpoints are pinned by the stepper, so their
    Laplacian entries are set to zero.
    """
    out = np.empty_like(V)
    out[1:-1] = (V[2:] - 2.0 * V[1:-1] + V[:-2]) / ds**2
    if bc.kind == "free-free":
        out[0] = 2.0 * (V[1] - V[0]) / ds**2
        out[-1] = 2.0 * (V[-2] - V[-1]) / ds**2
    else:
        out[0] = 0.0
        out[-1] = 0.0
    return out


def stable_dt(params: CableParams, ds: float, safety: float = 0.5) -> float:
    """Explicit-Euler diffusion stability bound ds^2 tau / (2 lambda^2), scaled."""
    return safety * ds**2 * params.tau / (2.0 * params.lam**2)


def step_cable(
    state: CableState,
    I: np.ndarray,
    params: CableParams,
    bc: BoundaryCondition,
    dt: float,
    ds: float,
) -> CableState:
    """Advance the cable one explicit Euler step under current field I [mV].

    Fixed-fixed overwrites the endpoint voltages after the update.
    """
    V, W = state.V, state.W
    V_new = V + (dt / params.tau) * (params.lam**2 * laplacian(V, ds, bc) - V - W + I)
    W_new = W + (dt / params.tau_adapt) * (-W + params.b * np.maximum(V, 0.0))
    if bc.kind == "fixed-fixed":
        V_new[0] = bc.v0
        V_new[-1] = bc.vL
    if not (np.isfinite(V_new).all() and np.isfinite(W_new).all()):
        raise IntegrationError(0, f"cable '{state.muscle_id}' produced non-finite fields")
    return CableState(V=V_new, W=W_new, muscle_id=state.muscle_id)


@dataclass
class RelaxResult:
    """Outcome of relax_to_steady."""

    state: CableState
    settling_time: float   # simulated seconds until residual < tol
    steps: int
    residual: float        # max |dV/dt|, |dW/dt| at exit [mV/s]


def relax_to_steady(
    state: CableState,
    I: np.ndarray,
    params: CableParams,
    bc: BoundaryCondition,
    ds: float,
    tol: float = 1e-6,
    dt: float | None = None,
    max_steps: int = 20_000_000,
    check_every: int = 200,
    use_kernel: bool = True,
) -> RelaxResult:
    """Step the cable under fixed input until both rate fields drop below tol.

    tol is in mV/s. Raises ConvergenceError with the final residual if
    max_steps is exhausted first. Long relaxations run through the compiled
    window; the numpy path is kept for reference and cross-checking.
    """
    if not tol > 0:
        raise ConfigurationError("tol", f"must be positive, got {tol}")
    if dt is None:
        dt = stable_dt(params, ds)
    V = state.V.copy()
    W = state.W.copy()
    if bc.kind == "fixed-fixed":
        V[0], V[-1] = bc.v0, bc.vL
    lam2 = params.lam**2
    I = np.asarray(I, dtype=float)

    def rates(Vf, Wf):
        dV = (lam2 * laplacian(Vf, ds, bc) - Vf - Wf + I) / params.tau
        dW = (-Wf + params.b * np.maximum(Vf, 0.0)) / params.tau_adapt
        if bc.kind == "fixed-fixed":
            dV[0] = 0.0
            dV[-1] = 0.0
        return dV, dW

    if use_kernel:
        from . import _kernel

        dV0, dW0 = rates(V, W)
        residual = max(np.abs(dV0).max(), np.abs(dW0).max())
        if residual < tol:
            return RelaxResult(CableState(V=V, W=W, muscle_id=state.muscle_id), 0.0, 0, float(residual))
        n = V.size - 1
        bc_code = _kernel.BC_CODES[bc.kind]
        dummy = np.zeros(0)
        steps = 0
        while steps < max_steps:
            window = min(check_every, max_steps - steps)
            residual = _kernel.cable_window(
                V, W, I, False, dummy, 0.0, 0.0,
                n, ds, dt, params.tau, params.tau_adapt, lam2, params.b,
                bc_code, bc.v0, bc.vL, window,
            )
            steps += window
            if residual < tol:
                settled = CableState(V=V, W=W, muscle_id=state.muscle_id)
                return RelaxResult(settled, steps * dt, steps, float(residual))
            if not np.isfinite(V[0]) or not np.isfinite(V[-1]):
                raise IntegrationError(steps, f"cable '{state.muscle_id}' diverged")
        raise ConvergenceError(float(residual), "cable relaxation timed out")

    residual = np.inf
    for step in range(max_steps):
        dV = (lam2 * laplacian(V, ds, bc) - V - W + I) / params.tau
        dW = (-W + params.b * np.maximum(V, 0.0)) / params.tau_adapt
        if bc.kind == "fixed-fixed":
            dV[0] = 0.0
            dV[-1] = 0.0
        if step % check_every == 0:
            residual = max(np.abs(dV).max(), np.abs(dW).max())
            if residual < tol:
                settled = CableState(V=V, W=W, muscle_id=state.muscle_id)
                return RelaxResult(settled, step * dt, step, float(residual))
        V = V + dt * dV
        W = W + dt * dW
        if step % 10_000 == 0 and not np.isfinite(V).all():
            raise IntegrationError(step, f"cable '{state.muscle_id}' diverged")
    raise ConvergenceError(float(residual), "cable relaxation timed out")
