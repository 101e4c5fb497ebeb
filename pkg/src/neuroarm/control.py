"""Control laws: sensory feedback currents, benchmark couples, and tracking.

The sensory feedback law injects current -mu*sin(alpha) on the arm segment up
to the closest point, split by sign between the two cables so each muscle
only ever receives non-negative current. The benchmark applies the same form
directly as a couple, bypassing the neural system, clipped to the physical
muscle limit c(s). Reference tracking inverts the activation to a target
voltage profile and shapes the cable input so that profile becomes a
closed-loop fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cable import CableParams
from .coupling import Activation, DEFAULT_ACTIVATION, sigma_inv
from .errors import ConfigurationError
from .geometry import ArmGeometry
from .sensing import SensoryReading


@dataclass(frozen=True)
class ControlConfig:
    """Law selection and gains for a scenario."""

    law: str = "sensory-feedback"   # benchmark | sensory-feedback | reference-tracking
    mu: float = 500.0               # sensory feedback gain [mV]
    mu_star: float = 3e-4           # benchmark couple gain [N*m], mid-arm couple scale
    beta: float = 10.0              # tracking gain [-]
    epsilon: float = 1e-3           # reference clamp
    current_cap: float = 1e4        # |I| guard for the explicit stepper [mV]

    def __post_init__(self):
        if self.law not in ("benchmark", "sensory-feedback", "reference-tracking"):
            raise ConfigurationError("law", f"unknown control law {self.law!r}")
        if not self.mu > 0:
            raise ConfigurationError("mu", f"must be positive, got {self.mu}")
        if not self.beta > 0:
            raise ConfigurationError("beta", f"must be positive, got {self.beta}")
        if not 0.0 < self.epsilon < 0.5:
            raise ConfigurationError("epsilon", f"must lie in (0, 0.5), got {self.epsilon}")


def sensory_feedback_current(
    reading: SensoryReading, mu: float, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Split feedback current fields (I_top, I_bottom) [mV], both non-negative.

    I = -mu*sin(alpha) on s <= s_bar and zero beyond; negative I drives the
    top cable, positive I the bottom one, so at most one is non-zero per node.
    """
    active = s <= reading.s_bar
    I = np.where(active, -mu * np.sin(reading.alpha), 0.0)
    I_top = np.where(I <= 0.0, -I, 0.0)
    I_bottom = np.where(I > 0.0, I, 0.0)
    return I_top, I_bottom


def benchmark_couple(
    reading: SensoryReading, mu_star: float, geometry: ArmGeometry
) -> np.ndarray:
    """Couple field -mu_star*sin(alpha) up to s_bar, clipped to |u| <= c(s)."""
    active = geometry.s <= reading.s_bar
    u = np.where(active, -mu_star * np.sin(reading.alpha), 0.0)
    return np.clip(u, -geometry.c, geometry.c)


def second_derivative(f: np.ndarray, ds: float) -> np.ndarray:
    """Central second differences with second-order one-sided end stencils."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / ds**2
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / ds**2
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / ds**2
    return out


def reference_tracking_current(
    V: np.ndarray,
    v_bar: np.ndarray,
    params: CableParams,
    beta: float,
    epsilon: float = 1e-3,
    ds: float | None = None,
    current_cap: float = 1e4,
    activation: Activation = DEFAULT_ACTIVATION,
) -> np.ndarray:
    """Current field making sigma_inv(v_bar) a closed-loop cable fixed point.

    I = b*g(V) + (1-beta)*V + beta*sigma_inv(v_bar) - lam^2 (sigma_inv(v_bar))_ss,
    with v_bar clamped to [epsilon, 1-epsilon] before inversion and the result
    capped to +-current_cap to protect the explicit stepper.
    """
    if ds is None:
        raise ConfigurationError("ds", "grid spacing required for the reference term")
    v_ref = np.clip(v_bar, epsilon, 1.0 - epsilon)
    V_ref = sigma_inv(v_ref, activation)
    I = (
        params.b * np.maximum(V, 0.0)
        + (1.0 - beta) * V
        + beta * V_ref
        - params.lam**2 * second_derivative(V_ref, ds)
    )
    return np.clip(I, -current_cap, current_cap)


def couple_to_activation_reference(
    u_star: np.ndarray, geometry: ArmGeometry, epsilon: float = 1e-3
) -> tuple[np.ndarray, np.ndarray]:
    """Split a net couple reference into per-muscle activation references.

    Positive couple goes to the bottom muscle, negative to the top, each
    normalized by c(s) and clamped to [epsilon, 1-epsilon] so that
    c*(v_bottom - v_top) ~= u_star within the clamp.
    """
    ratio = u_star / geometry.c
    v_bottom = np.clip(np.where(ratio > 0.0, ratio, 0.0), epsilon, 1.0 - epsilon)
    v_top = np.clip(np.where(ratio < 0.0, -ratio, 0.0), epsilon, 1.0 - epsilon)
    return v_top, v_bottom
