"""Planar neuromuscular soft-arm simulator.

An inextensible elastic rod driven by two longitudinal muscles whose
activations come from two excitable neural cables under distributed current
control, with rest-state equilibrium analysis, target-reaching control laws,
and Lyapunov-based runtime monitors.
"""

__version__ = "0.1.0"

from .cable import BoundaryCondition, CableParams, CableState, relax_to_steady, step_cable
from .control import (
    ControlConfig,
    benchmark_couple,
    couple_to_activation_reference,
    reference_tracking_current,
    sensory_feedback_current,
)
from .coupling import Activation, muscle_couples, sigma, sigma_inv
from .diagnostics import (
    DiagnosticsSample,
    lyapunov_neural,
    mechanical_energy,
    reach_status,
    tip_curvature,
)
from .equilibrium import (
    EquilibriumVoltage,
    RestShape,
    rest_curvature,
    rest_shape,
    solve_voltage_equilibrium,
)
from .errors import (
    AnalysisError,
    ConfigurationError,
    ConvergenceError,
    IntegrationError,
    NeuroarmError,
)
from .geometry import ArmGeometry, GeometryConfig, RodState, build_arm, reconstruct_shape
from .harness import Scenario, load_scenario, run_atlas, run_reaching, run_validation
from .rod import DragModel, InternalLoads, drag_force, internal_loads, step_rod, suggest_dt
from .sensing import SensoryReading, sense
from .simulation import CoupledSimulation, ReachThresholds, Trajectory

__all__ = [
    "Activation",
    "AnalysisError",
    "ArmGeometry",
    "BoundaryCondition",
    "CableParams",
    "CableState",
    "ConfigurationError",
    "ControlConfig",
    "ConvergenceError",
    "CoupledSimulation",
    "DiagnosticsSample",
    "DragModel",
    "EquilibriumVoltage",
    "GeometryConfig",
    "IntegrationError",
    "InternalLoads",
    "NeuroarmError",
    "ReachThresholds",
    "RestShape",
    "RodState",
    "Scenario",
    "SensoryReading",
    "Trajectory",
    "benchmark_couple",
    "build_arm",
    "couple_to_activation_reference",
    "drag_force",
    "internal_loads",
    "load_scenario",
    "lyapunov_neural",
    "mechanical_energy",
    "muscle_couples",
    "reach_status",
    "reconstruct_shape",
    "reference_tracking_current",
    "relax_to_steady",
    "rest_curvature",
    "rest_shape",
    "run_atlas",
    "run_reaching",
    "run_validation",
    "sense",
    "sensory_feedback_current",
    "sigma",
    "sigma_inv",
    "solve_voltage_equilibrium",
    "step_cable",
    "step_rod",
    "suggest_dt",
    "tip_curvature",
]
