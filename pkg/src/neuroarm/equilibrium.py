"""Closed-form rest-state analysis of the cables and the resulting arm shape.

With zero input and fixed-fixed boundaries the steady voltage solves
lam^2 V'' = V + b*max(V, 0). Where V >= 0 the rectifier is active and the
effective length constant shrinks to lam/sqrt(1+b); where V <= 0 it stays
lam. Boundary values of one sign give a single exponential pair; boundary
values of opposite signs give two pieces matched with value zero and a
continuous slope at the crossing point, found by bisection.

The rest curvature is c(s)/EI(s) times the activation difference of the two
cables, and the rest shape follows by integrating the kinematics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cable import CableParams
from .coupling import sigma
from .errors import AnalysisError
from .geometry import ArmGeometry, reconstruct_shape


@dataclass(frozen=True)
class EquilibriumVoltage:
    """Closed-form steady cable voltage under fixed-fixed boundaries.

    ``case`` is "same-sign" (single exponential pair with length constant
    lam_hat) or "sign-change" (two pieces with constants lam_hat_1 on
    [0, s1] and lam_hat_2 on [s1, L], V(s1) = 0).
    """

    case: str
    v0: float
    vL: float
    L: float
    lam_hat_1: float          # length constant of the first (or only) piece
    lam_hat_2: float          # second piece; equals lam_hat_1 when same-sign
    s1: float | None          # zero crossing [m], sign-change only
    c1: float                 # e^{+s/lam} coefficient, first piece
    c2: float                 # e^{-s/lam} coefficient, first piece
    p1: float = 0.0           # e^{+s/lam} coefficient, second piece
    p2: float = 0.0           # e^{-s/lam} coefficient, second piece

    def __call__(self, s) -> np.ndarray:
        """Evaluate the profile at arc positions s (well-conditioned form)."""
        s = np.asarray(s, dtype=float)
        if self.case == "same-sign":
            return _pinned_profile(s, 0.0, self.L, self.v0, self.vL, self.lam_hat_1)
        out = np.empty_like(s)
        left = s <= self.s1
        out[left] = _pinned_profile(s[left], 0.0, self.s1, self.v0, 0.0, self.lam_hat_1)
        out[~left] = _pinned_profile(s[~left], self.s1, self.L, 0.0, self.vL, self.lam_hat_2)
        return out

    def slope(self, s) -> np.ndarray:
        """Spatial derivative of the profile."""
        s = np.asarray(s, dtype=float)
        if self.case == "same-sign":
            return _pinned_slope(s, 0.0, self.L, self.v0, self.vL, self.lam_hat_1)
        out = np.empty_like(s)
        left = s <= self.s1
        out[left] = _pinned_slope(s[left], 0.0, self.s1, self.v0, 0.0, self.lam_hat_1)
        out[~left] = _pinned_slope(s[~left], self.s1, self.L, 0.0, self.vL, self.lam_hat_2)
        return out


def _pinned_profile(s, a, bnd, va, vb, lam):
    """Solution of lam^2 V'' = V on [a, bnd] with V(a)=va, V(bnd)=vb."""
    width = bnd - a
    return (va * np.sinh((bnd - s) / lam) + vb * np.sinh((s - a) / lam)) / np.sinh(width / lam)


def _pinned_slope(s, a, bnd, va, vb, lam):
    width = bnd - a
    return (-va * np.cosh((bnd - s) / lam) + vb * np.cosh((s - a) / lam)) / (
        lam * np.sinh(width / lam)
    )


def _exp_coefficients(a, bnd, va, vb, lam):
    """(c1, c2) with V = c1 e^{s/lam} + c2 e^{-s/lam} matching the endpoints."""
    ea, eb = np.exp(a / lam), np.exp(bnd / lam)
    det = eb / ea - ea / eb
    c1 = (vb / ea - va / eb) / det
    c2 = (va * eb - vb * ea) / det
    return float(c1), float(c2)


def solve_voltage_equilibrium(
    v0: float, vL: float, params: CableParams, L: float
) -> EquilibriumVoltage:
    """Closed-form fixed-fixed steady state for boundary voltages (v0, vL) [mV]."""
    if not (np.isfinite(v0) and np.isfinite(vL)):
        raise AnalysisError(f"boundary voltages must be finite, got ({v0}, {vL})")
    lam_active = params.lam / np.sqrt(1.0 + params.b)   # rectifier engaged (V >= 0)
    lam_passive = params.lam                            # rectifier off (V <= 0)

    if v0 * vL >= 0.0:
        # Sign determined by whichever boundary is nonzero; V == 0 if both are.
        positive = (v0 + vL) >= 0.0
        lam_hat = lam_active if positive else lam_passive
        c1, c2 = _exp_coefficients(0.0, L, v0, vL, lam_hat)
        return EquilibriumVoltage(
            case="same-sign",
            v0=float(v0),
            vL=float(vL),
            L=L,
            lam_hat_1=lam_hat,
            lam_hat_2=lam_hat,
            s1=None,
            c1=c1,
            c2=c2,
        )

    lam1 = lam_active if v0 > 0 else lam_passive
    lam2 = lam_active if vL > 0 else lam_passive

    def slope_mismatch(s1: float) -> float:
        # Left slope at s1 minus right slope at s1, both pieces pinned to zero there.
        left = -v0 / (lam1 * np.sinh(s1 / lam1))
        right = vL / (lam2 * np.sinh((L - s1) / lam2))
        return left - right

    lo, hi = 1e-9 * L, (1.0 - 1e-9) * L
    f_lo, f_hi = slope_mismatch(lo), slope_mismatch(hi)
    if not np.sign(f_lo) != np.sign(f_hi):
        raise AnalysisError(
            f"zero-crossing bracket failed: mismatch({lo:.3e}) = {f_lo:.3e}, "
            f"mismatch({hi:.3e}) = {f_hi:.3e}"
        )
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if np.sign(slope_mismatch(mid)) == np.sign(f_lo):
            lo = mid
        else:
            hi = mid
    s1 = 0.5 * (lo + hi)

    c1, c2 = _exp_coefficients(0.0, s1, v0, 0.0, lam1)
    p1, p2 = _exp_coefficients(s1, L, 0.0, vL, lam2)
    return EquilibriumVoltage(
        case="sign-change",
        v0=float(v0),
        vL=float(vL),
        L=L,
        lam_hat_1=lam1,
        lam_hat_2=lam2,
        s1=float(s1),
        c1=c1,
        c2=c2,
        p1=p1,
        p2=p2,
    )


def rest_curvature(
    eq_top: EquilibriumVoltage, eq_bottom: EquilibriumVoltage, geometry: ArmGeometry
) -> np.ndarray:
    """Equilibrium curvature c/EI * (sigma(V_top) - sigma(V_bottom)), per node."""
    v_top = eq_top(geometry.s)
    v_bottom = eq_bottom(geometry.s)
    return geometry.c / geometry.EI * (sigma(v_top) - sigma(v_bottom))


@dataclass(frozen=True)
class RestShape:
    """Rest-state voltages, curvature, and reconstructed centerline."""

    eq_top: EquilibriumVoltage
    eq_bottom: EquilibriumVoltage
    kappa: np.ndarray    # node curvature field, shape (n+1,)
    theta: np.ndarray    # node angles, shape (n+1,)
    r: np.ndarray        # centerline, shape (n+1, 2)


def rest_shape(
    v0_top: float,
    vL_top: float,
    v0_bottom: float,
    vL_bottom: float,
    params: CableParams,
    geometry: ArmGeometry,
) -> RestShape:
    """Compose voltage equilibria, rest curvature, and shape reconstruction."""
    eq_top = solve_voltage_equilibrium(v0_top, vL_top, params, geometry.L)
    eq_bottom = solve_voltage_equilibrium(v0_bottom, vL_bottom, params, geometry.L)
    kappa = rest_curvature(eq_top, eq_bottom, geometry)
    theta, r = reconstruct_shape(kappa, geometry)
    return RestShape(eq_top=eq_top, eq_bottom=eq_bottom, kappa=kappa, theta=theta, r=r)
