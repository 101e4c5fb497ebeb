"""Voltage-to-muscle coupling: the saturating activation and net couples.

The activation maps membrane voltage [mV] to a normalized contraction level
in [0, 1]. It is exactly 0 below 40 - 1/0.98 mV and exactly 1 above
40 + 1/0.98 mV; inside that band it interpolates through nested tanh/artanh
with slope constants (0.98, 1/40). The net couple on the rod is bottom minus
top, each muscle contributing c(s) * activation pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import ArmGeometry


@dataclass(frozen=True)
class Activation:
    """Constants of the activation nonlinearity."""

    center: float = 40.0       # half-activation voltage [mV]
    band_gain: float = 0.98    # inner artanh argument scale [1/mV]
    steepness: float = 1.0 / 40.0  # outer tanh argument scale

    @property
    def half_width(self) -> float:
        """Half-width of the graded band [mV]; saturation outside."""
        return 1.0 / self.band_gain


DEFAULT_ACTIVATION = Activation()


def sigma(v, activation: Activation = DEFAULT_ACTIVATION):
    """Activation level in [0, 1] for voltage ``v`` [mV]. Vectorized.

    Clamps to the saturation limits outside the open band where the inner
    artanh is finite.
    """
    act = activation
    v = np.asarray(v, dtype=float)
    x = act.band_gain * (v - act.center)
    out = np.empty_like(x)
    lo = x <= -1.0
    hi = x >= 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    out[mid] = 0.5 * (1.0 + np.tanh(act.steepness * np.arctanh(x[mid])))
    if out.ndim == 0:
        return float(out)
    return out


def sigma_inv(v_act, activation: Activation = DEFAULT_ACTIVATION):
    """Voltage [mV] whose activation equals ``v_act``; v_act must lie in [0, 1].

    The endpoints map to the finite band edges center -+ 1/band_gain.
    """
    act = activation
    v_act = np.asarray(v_act, dtype=float)
    if np.any(v_act < 0.0) or np.any(v_act > 1.0):
        raise ConfigurationError("activation", "inverse domain is [0, 1]")
    out = np.empty_like(v_act)
    lo = v_act <= 0.0
    hi = v_act >= 1.0
    mid = ~(lo | hi)
    out[lo] = act.center - act.half_width
    out[hi] = act.center + act.half_width
    out[mid] = act.center + act.half_width * np.tanh(
        np.arctanh(2.0 * v_act[mid] - 1.0) / act.steepness
    )
    if out.ndim == 0:
        return float(out)
    return out


def muscle_couples(
    v_top: np.ndarray,
    v_bottom: np.ndarray,
    geometry: ArmGeometry,
    activation: Activation = DEFAULT_ACTIVATION,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-muscle couples c(s) * sigma(V) and the net couple bottom - top.

    Returns (u_top, u_bottom, u_net), all on the node grid [N*m].
    """
    u_top = geometry.c * sigma(v_top, activation)
    u_bottom = geometry.c * sigma(v_bottom, activation)
    return u_top, u_bottom, u_bottom - u_top
