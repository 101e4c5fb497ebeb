"""Target sensing: bearing along the arm and the closest-point arc length.

The bearing at a node is the signed angle from the local tangent to the
target direction, wrapped to (-pi, pi]. Positive bearing means the target
lies on the local normal's side (left of the tangent), which is the side the
top muscle bends toward. The closest point is the grid argmin of the node
distances, ties broken toward the tip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RodState

TOUCH_EPS = 1e-9  # node-coincidence guard [m]


@dataclass(frozen=True)
class SensoryReading:
    """Per-node bearing field plus closest-point summary."""

    alpha: np.ndarray      # signed bearing per node [rad], in (-pi, pi]
    s_bar: float           # arc length of the closest node [m]
    s_bar_index: int
    dist: float            # distance from the closest node to the target [m]
    touching: bool         # target within TOUCH_EPS of a node


def sense(state: RodState, target: np.ndarray) -> SensoryReading:
    """Compute (alpha, s_bar) for the given rod state and target position."""
    target = np.asarray(target, dtype=float)
    offsets = target[None, :] - state.r
    dists = np.hypot(offsets[:, 0], offsets[:, 1])
    # argmin with ties (and the out-of-reach plateau) resolved toward larger s
    rev = dists[::-1]
    idx = dists.size - 1 - int(np.argmin(rev))
    node_angles = state.node_angles
    bearing = np.arctan2(offsets[:, 1], offsets[:, 0]) - node_angles
    alpha = np.mod(bearing + np.pi, 2.0 * np.pi) - np.pi
    # wrap convention: boundary value -pi maps to +pi so alpha lies in (-pi, pi]
    alpha[alpha == -np.pi] = np.pi
    touching = bool(dists[idx] < TOUCH_EPS)
    if touching:
        coincident = dists < TOUCH_EPS
        alpha = alpha.copy()
        alpha[coincident] = 0.0
    return SensoryReading(
        alpha=alpha,
        s_bar=float(idx * state.ds),
        s_bar_index=idx,
        dist=float(dists[idx]),
        touching=touching,
    )
