"""Time integration of the planar inextensible rod under muscle couples.

Staggered discretization: positions and velocities live on nodes, angles and
angular rates on elements, curvature and bending moments on interior nodes.
One step is a semi-implicit kick (internal loads explicit, the linear
damping terms implicit, which the vanishing tip inertia requires), a
velocity projection onto the zero-stretch-rate tangent space, a drift, and
a position projection that resets segment lengths to ds exactly while
keeping directions.

The unshearable limit is imposed by a stiff shear penalty between the
element frame and the segment direction; that penalty force is the n2
coupling term of the angular momentum balance. The free end carries no
element, so the assembled internal force and couple vanish there
identically; the base node and first element are clamped.

Damping: the tabulated point coefficient zeta [kg/s] acts on node velocities
as zeta_per_length * r_t, and a separate rotational coefficient zeta_rot
[N*s] acts on element angular rates. zeta_rot is calibrated inside the
window where it suppresses grid-scale actuation chatter at the thin tip
(lower bound ~3e-4) without freezing tip curl dynamics on the seconds
timescale (upper bound ~4e-3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .cable import CableParams
from .errors import ConfigurationError, IntegrationError
from .geometry import ArmGeometry, RodState

ELASTIC_SAFETY = 0.25
NEURAL_SAFETY = 0.5
SHEAR_RIGIDITY_FACTOR = 4.0 / 9.0   # (4/3) Timoshenko shear factor times G = E/3


@dataclass(frozen=True)
class DragModel:
    """Resistive fluid drag with separate tangential/normal coefficients."""

    c_tangential: float = 0.01   # [kg/(m*s)] linear, [kg/m^2] quadratic
    c_normal: float = 0.1
    mode: str = "linear"         # "linear" | "quadratic"

    def __post_init__(self):
        if self.c_tangential < 0:
            raise ConfigurationError("c_tangential", "must be non-negative")
        if self.c_normal < 0:
            raise ConfigurationError("c_normal", "must be non-negative")
        if self.mode not in ("linear", "quadratic"):
            raise ConfigurationError("mode", f"unknown drag mode {self.mode!r}")


NO_DRAG = DragModel(c_tangential=0.0, c_normal=0.0)


@dataclass(frozen=True)
class InternalLoads:
    """Assembled internal force components and total couple, node-aligned.

    Entry i of n1/n2 is the force transmitted through the element on the tip
    side of node i; the last entry is the free-end value, identically zero.
    m holds EI*kappa + u at interior nodes, zero at the free end, and a
    linear extrapolation at the clamped base.
    """

    n1: np.ndarray
    n2: np.ndarray
    m: np.ndarray


def suggest_dt(geometry: ArmGeometry, cable_params: CableParams | None = None) -> float:
    """Shared explicit step: min of the elastic CFL and the neural diffusion bound."""
    ds = geometry.ds
    dt_elastic = ELASTIC_SAFETY * ds * np.sqrt(geometry.rho / geometry.E)
    if cable_params is None:
        return float(dt_elastic)
    dt_neural = NEURAL_SAFETY * ds**2 * cable_params.tau / (2.0 * cable_params.lam**2)
    return float(min(dt_elastic, dt_neural))


def drag_force(state: RodState, drag: DragModel) -> np.ndarray:
    """Per-node drag force [N/m] opposing velocity, tangent/normal decomposed."""
    phi = state.node_angles
    a = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    b = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
    v_t = np.sum(state.r_t * a, axis=1)
    v_n = np.sum(state.r_t * b, axis=1)
    if drag.mode == "quadratic":
        f_t = -drag.c_tangential * np.abs(v_t) * v_t
        f_n = -drag.c_normal * np.abs(v_n) * v_n
    else:
        f_t = -drag.c_tangential * v_t
        f_n = -drag.c_normal * v_n
    return f_t[:, None] * a + f_n[:, None] * b


def _element_properties(geometry: ArmGeometry):
    """Element-midpoint section properties (adjacent-node averages)."""
    A_e = 0.5 * (geometry.A[1:] + geometry.A[:-1])
    I_e = 0.5 * (geometry.I[1:] + geometry.I[:-1])
    return A_e, I_e


def node_masses(geometry: ArmGeometry) -> np.ndarray:
    """Lumped node masses [kg]; end nodes carry half an element."""
    A_e, _ = _element_properties(geometry)
    half = 0.5 * geometry.rho * geometry.ds * A_e
    mass = np.zeros(geometry.n + 1)
    mass[:-1] += half
    mass[1:] += half
    return mass


def internal_loads(state: RodState, u: np.ndarray, geometry: ArmGeometry) -> InternalLoads:
    """Assemble (n1, n2, m) for the current state and couple field u (nodes)."""
    n = geometry.n
    ds = geometry.ds
    A_e, _ = _element_properties(geometry)
    cos_t, sin_t = np.cos(state.theta), np.sin(state.theta)
    seg = (state.r[1:] - state.r[:-1]) / ds
    nu1 = seg[:, 0] * cos_t + seg[:, 1] * sin_t
    nu2 = -seg[:, 0] * sin_t + seg[:, 1] * cos_t
    n1 = np.zeros(n + 1)
    n2 = np.zeros(n + 1)
    n1[:-1] = geometry.E * A_e * (nu1 - 1.0)
    n2[:-1] = SHEAR_RIGIDITY_FACTOR * geometry.E * A_e * nu2
    u = np.asarray(u, dtype=float)
    m = np.zeros(n + 1)
    kappa = state.kappa
    m[1:-1] = geometry.EI[1:-1] * kappa + u[1:-1]
    m[0] = geometry.EI[0] * (2.0 * kappa[0] - kappa[1]) + u[0]
    return InternalLoads(n1=n1, n2=n2, m=m)


def step_rod(
    state: RodState,
    u: np.ndarray,
    geometry: ArmGeometry,
    dt: float,
    drag: DragModel = NO_DRAG,
) -> RodState:
    """Advance the rod one step under the node couple field u [N*m].

    Returns a new state; the input is not modified.
    """
    n = geometry.n
    ds = geometry.ds
    A_e, I_e = _element_properties(geometry)
    rho_I_e = geometry.rho * I_e
    mass = node_masses(geometry)
    tributary = np.full(n + 1, ds)
    tributary[0] = tributary[-1] = 0.5 * ds

    theta, omega = state.theta, state.theta_t
    r, v = state.r, state.r_t

    cos_t, sin_t = np.cos(theta), np.sin(theta)
    seg = (r[1:] - r[:-1]) / ds
    nu1 = seg[:, 0] * cos_t + seg[:, 1] * sin_t
    nu2 = -seg[:, 0] * sin_t + seg[:, 1] * cos_t
    n1 = geometry.E * A_e * (nu1 - 1.0)
    n2 = SHEAR_RIGIDITY_FACTOR * geometry.E * A_e * nu2

    u = np.asarray(u, dtype=float)
    m_nodes = np.zeros(n + 1)
    m_nodes[1:-1] = geometry.EI[1:-1] * state.kappa + u[1:-1]
    # m_nodes[n] stays zero: moment-free tip

    # element angular momentum balance (element 0 is clamped); damping is
    # implicit because the tip's rotary inertia is tiny
    torque = (m_nodes[2:] - m_nodes[1:-1]) / ds + n2[1:]
    omega_new = omega.copy()
    omega_new[1:] = (omega[1:] + dt * torque / rho_I_e[1:]) / (
        1.0 + dt * geometry.zeta_rot / rho_I_e[1:]
    )
    omega_new[0] = 0.0

    # node linear momentum balance (node 0 is clamped)
    # element internal force in the lab frame; net on node i is F[i] - F[i-1]
    # (tip-side material pulls the node forward, base-side pulls it back)
    F = n1[:, None] * np.stack([cos_t, sin_t], axis=1) + n2[:, None] * np.stack(
        [-sin_t, cos_t], axis=1
    )
    net = np.zeros((n + 1, 2))
    net[:-1] += F
    net[1:] -= F
    if drag.c_tangential != 0.0 or drag.c_normal != 0.0:
        net += drag_force(state, drag) * tributary[:, None]
    v_new = np.zeros_like(v)
    damp = 1.0 + dt * geometry.zeta_per_length * tributary[1:] / mass[1:]
    v_new[1:] = (v[1:] + dt * net[1:] / mass[1:, None]) / damp[:, None]

    # project velocities onto the constraint tangent space (zero stretch rate
    # per segment), mass-weighted so the removal only ever takes energy out
    diff0 = r[1:] - r[:-1]
    len0 = np.hypot(diff0[:, 0], diff0[:, 1])
    t_hat0 = diff0 / len0[:, None]
    v_new = _project_stretch_rate(v_new, t_hat0, mass)

    theta_new = theta + dt * omega_new
    theta_new[0] = 0.0
    r_pred = r + dt * v_new
    r_pred[0] = 0.0

    # project positions onto the inextensibility manifold: keep directions,
    # reset segment lengths to ds exactly
    diff = r_pred[1:] - r_pred[:-1]
    length = np.hypot(diff[:, 0], diff[:, 1])
    t_hat = diff / length[:, None]
    r_new = np.zeros_like(r)
    r_new[1:] = np.cumsum(ds * t_hat, axis=0)

    if not np.isfinite(r_new[-1]).all() or not np.isfinite(theta_new[-1]):
        raise IntegrationError(0, "rod state diverged")

    return RodState(r=r_new, theta=theta_new, r_t=v_new, theta_t=omega_new, ds=state.ds)


def _project_stretch_rate(v: np.ndarray, t_hat: np.ndarray, mass: np.ndarray) -> np.ndarray:
    """Remove per-segment stretch rates (v[i+1]-v[i]).t_hat[i] from v.

    Solves the mass-weighted least-change correction via the symmetric
    tridiagonal system J M^-1 J^T lam = -J v; the clamped base node has
    infinite effective mass.
    """
    n_seg = t_hat.shape[0]
    w = 1.0 / mass
    w[0] = 0.0  # clamped node does not move
    g = np.sum((v[1:] - v[:-1]) * t_hat, axis=1)
    diag = w[:-1] + w[1:]
    off = -w[1:-1] * np.sum(t_hat[1:] * t_hat[:-1], axis=1)
    ab = np.zeros((2, n_seg))
    ab[0, 1:] = off
    ab[1] = diag
    lam = solveh_banded(ab, -g)
    dv = np.zeros_like(v)
    dv[:-1] += -lam[:, None] * t_hat
    dv[1:] += lam[:, None] * t_hat
    return v + w[:, None] * dv
