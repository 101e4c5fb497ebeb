"""Tapered arm reference geometry, the arc-length grid, and shape reconstruction.

The arm is a linearly tapered circular rod. All cross-section quantities are
stored pointwise on a uniform node grid s_0 = 0 .. s_n = L shared with the
neural cables. The peak muscle couple profile follows a cubic taper law
c(s) = M_max (radius(s)/base_radius)^3: constant muscle stress times area
(~radius^2) times moment arm (~radius). When M_max is not given it is
calibrated so a fully activated single muscle curls the mid-arm at
|kappa| = 2*pi/L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class GeometryConfig:
    """Arm geometry and material parameters. Defaults are the reference arm."""

    length: float = 0.2          # rest length [m]
    elements: int = 100          # number of elements (nodes = elements + 1)
    base_radius: float = 0.01    # [m]
    tip_radius: float = 0.001    # [m]
    youngs_modulus: float = 1.0e4  # [Pa]
    density: float = 1042.0      # [kg/m^3]
    damping: float = 0.01        # point dissipation per reference node [kg/s]
    rotational_damping: float = 1.5e-3  # angular-rate dissipation [N*s]
    max_couple: float | None = None  # peak muscle couple at the base [N*m]


@dataclass(frozen=True)
class ArmGeometry:
    """Immutable per-node reference data for the tapered arm."""

    L: float
    n: int
    s: np.ndarray          # node arc lengths, shape (n+1,)
    radius: np.ndarray     # taper profile [m], shape (n+1,)
    A: np.ndarray          # cross-section area [m^2], shape (n+1,)
    I: np.ndarray          # second moment of area [m^4], shape (n+1,)
    E: float               # Young's modulus [Pa]
    rho: float             # density [kg/m^3]
    zeta: float            # damping coefficient [kg/s]
    zeta_rot: float        # rotational damping coefficient [N*s]
    c: np.ndarray          # max muscle couple profile [N*m], shape (n+1,)
    max_couple: float      # c at the base [N*m]

    @property
    def ds(self) -> float:
        return self.L / self.n

    @property
    def EI(self) -> np.ndarray:
        return self.E * self.I

    @property
    def zeta_per_length(self) -> float:
        """Translational damping per unit length [kg/(m*s)].

        The tabulated zeta [kg/s] is a point damper per node of the reference
        discretization (100 elements); dividing by that spacing keeps the
        damping field independent of the actual grid.
        """
        return self.zeta / (self.L / 100.0)


def calibrated_max_couple(config: GeometryConfig) -> float:
    """M_max such that full activation of one muscle gives kappa = 2*pi/L mid-arm.

    With c = M_max (r/r_base)^3 and EI = E pi r^4 / 4, the saturated curvature
    is c/EI = 4 M_max / (pi E r_base^3 r); equating to 2*pi/L at the mid-arm
    radius gives the value below.
    """
    r_mid = 0.5 * (config.base_radius + config.tip_radius)
    return (
        np.pi**2
        * config.youngs_modulus
        * config.base_radius**3
        * r_mid
        / (2.0 * config.length)
    )


def build_arm(config: GeometryConfig) -> ArmGeometry:
    """Construct the tapered arm on a uniform grid; validates all parameters."""
    if not config.length > 0:
        raise ConfigurationError("length", f"must be positive, got {config.length}")
    if config.elements < 16:
        raise ConfigurationError("elements", f"need at least 16, got {config.elements}")
    if not config.tip_radius > 0:
        raise ConfigurationError("tip_radius", f"must be positive, got {config.tip_radius}")
    if not config.base_radius >= config.tip_radius:
        raise ConfigurationError(
            "base_radius",
            f"must be at least tip_radius ({config.tip_radius}), got {config.base_radius}",
        )
    if not config.youngs_modulus > 0:
        raise ConfigurationError(
            "youngs_modulus", f"must be positive, got {config.youngs_modulus}"
        )
    if not config.density > 0:
        raise ConfigurationError("density", f"must be positive, got {config.density}")
    if config.damping < 0:
        raise ConfigurationError("damping", f"must be non-negative, got {config.damping}")
    if config.rotational_damping < 0:
        raise ConfigurationError(
            "rotational_damping", f"must be non-negative, got {config.rotational_damping}"
        )

    n = config.elements
    s = np.linspace(0.0, config.length, n + 1)
    radius = config.base_radius + (config.tip_radius - config.base_radius) * s / config.length
    area = np.pi * radius**2
    second_moment = np.pi * radius**4 / 4.0

    m_max = config.max_couple
    if m_max is None:
        m_max = calibrated_max_couple(config)
    if not m_max > 0:
        raise ConfigurationError("max_couple", f"must be positive, got {m_max}")
    c = m_max * (radius / config.base_radius) ** 3

    return ArmGeometry(
        L=config.length,
        n=n,
        s=s,
        radius=radius,
        A=area,
        I=second_moment,
        E=config.youngs_modulus,
        rho=config.density,
        zeta=config.damping,
        zeta_rot=config.rotational_damping,
        c=c,
        max_couple=float(m_max),
    )


def reconstruct_shape(kappa: np.ndarray, geometry: ArmGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Integrate a curvature field into node angles and centerline positions.

    ``kappa`` may be given on all n+1 nodes or on the n-1 interior nodes (it
    is then edge-padded). The angle is the cumulative trapezoidal integral of
    kappa with theta(0) = 0; positions integrate (cos theta, sin theta) the
    same way from r(0) = 0. Arc length is preserved to integrator order.

    Returns (theta, r) with theta of shape (n+1,) and r of shape (n+1, 2).
    """
    n = geometry.n
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape == (n - 1,):
        kappa = np.concatenate(([kappa[0]], kappa, [kappa[-1]]))
    elif kappa.shape != (n + 1,):
        raise ConfigurationError(
            "kappa", f"expected {n + 1} node or {n - 1} interior values, got {kappa.shape}"
        )
    ds = geometry.ds
    theta = np.zeros(n + 1)
    theta[1:] = np.cumsum(0.5 * ds * (kappa[1:] + kappa[:-1]))
    tangent = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    r = np.zeros((n + 1, 2))
    r[1:] = np.cumsum(0.5 * ds * (tangent[1:] + tangent[:-1]), axis=0)
    return theta, r


@dataclass
class RodState:
    """Discretized rod state on the staggered grid.

    Positions and velocities live on the n+1 nodes; angles and angular rates
    on the n elements. Curvature is the exact element-angle difference at the
    n-1 interior nodes. The base is clamped: r[0] = 0, theta[0] = 0.
    """

    r: np.ndarray        # node positions, shape (n+1, 2)
    theta: np.ndarray    # element angles, shape (n,)
    r_t: np.ndarray      # node velocities, shape (n+1, 2)
    theta_t: np.ndarray  # element angular rates, shape (n,)
    ds: float

    @property
    def kappa(self) -> np.ndarray:
        """Curvature at interior nodes, (theta[i+1] - theta[i]) / ds."""
        return (self.theta[1:] - self.theta[:-1]) / self.ds

    @property
    def node_angles(self) -> np.ndarray:
        """Angles interpolated to nodes (element averages, one-sided at ends)."""
        th = np.empty(self.theta.size + 1)
        th[0] = self.theta[0]
        th[-1] = self.theta[-1]
        th[1:-1] = 0.5 * (self.theta[1:] + self.theta[:-1])
        return th

    def copy(self) -> "RodState":
        return RodState(
            r=self.r.copy(),
            theta=self.theta.copy(),
            r_t=self.r_t.copy(),
            theta_t=self.theta_t.copy(),
            ds=self.ds,
        )

    @classmethod
    def straight(cls, geometry: ArmGeometry) -> "RodState":
        """Undeformed rod along e1, at rest."""
        n = geometry.n
        r = np.zeros((n + 1, 2))
        # chain positions exactly as the solver's projection does, so the
        # straight state is a bit-exact fixed point
        r[1:, 0] = np.cumsum(np.full(n, geometry.ds))
        return cls(
            r=r,
            theta=np.zeros(n),
            r_t=np.zeros((n + 1, 2)),
            theta_t=np.zeros(n),
            ds=geometry.ds,
        )

    @classmethod
    def from_curvature(cls, kappa_interior: np.ndarray, geometry: ArmGeometry) -> "RodState":
        """Rod at rest whose staggered curvature equals ``kappa_interior`` exactly.

        Element angles are chained with theta[0] = 0 so that the discrete
        curvature (theta[i+1]-theta[i])/ds reproduces the input bit-for-bit,
        and positions are chained with exact segment lengths ds.
        """
        n = geometry.n
        kappa_interior = np.asarray(kappa_interior, dtype=float)
        if kappa_interior.shape != (n - 1,):
            raise ConfigurationError(
                "kappa", f"expected {n - 1} interior values, got {kappa_interior.shape}"
            )
        ds = geometry.ds
        theta = np.zeros(n)
        theta[1:] = np.cumsum(ds * kappa_interior)
        r = np.zeros((n + 1, 2))
        r[1:, 0] = np.cumsum(ds * np.cos(theta))
        r[1:, 1] = np.cumsum(ds * np.sin(theta))
        return cls(
            r=r,
            theta=theta,
            r_t=np.zeros((n + 1, 2)),
            theta_t=np.zeros(n),
            ds=ds,
        )
