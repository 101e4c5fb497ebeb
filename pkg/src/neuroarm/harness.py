"""Scenario-driven runs: config parsing, atlas/reaching/validation, file output.

Config files are TOML with one table per subsystem; every key has a default
matching the reference parameter table, so an empty file reproduces the
standard arm. The same parsed Scenario can be re-serialized canonically,
which the round-trip test pins.

Trajectory CSV schema (one file per run): header row, then per output sample
one row per node with columns

    t, node, s, r_x, r_y, theta, kappa, V_top, V_bottom, W_top, W_bottom,
    I_top, I_bottom, u_net

followed by one diagnostics row keyed by node = -1 whose columns are reused
as: s = s_bar_over_L, r_x = kappa_tip, r_y = energy, theta = lyap_neural
(nan unless a constant-reference tracking monitor is active), kappa =
max_speed, V_top = dist, V_bottom = status code (0 not-reached, 1 pointing,
2 touching); the remaining columns are zero. kappa on node rows is the
interior field padded with its edge values at both ends.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cable import CableParams
from .control import ControlConfig
from .coupling import sigma
from .equilibrium import rest_shape
from .errors import ConfigurationError, NeuroarmError
from .geometry import ArmGeometry, GeometryConfig, build_arm
from .rod import DragModel
from .simulation import CoupledSimulation, ReachThresholds, Trajectory

STATUS_CODES = {"not-reached": 0, "pointing": 1, "touching": 2}


@dataclass(frozen=True)
class Scenario:
    """Fully resolved description of one run."""

    kind: str = "reaching"                    # atlas | reaching | validation
    geometry: GeometryConfig = GeometryConfig()
    cable: CableParams = CableParams()
    drag: DragModel = DragModel()
    control: ControlConfig = ControlConfig()
    thresholds: ReachThresholds = ReachThresholds()
    rest_top: tuple[float, float] = (65.0, 65.0)
    rest_bottom: tuple[float, float] = (40.0, 0.0)
    target: tuple[float, float] = (0.2, 0.1)
    duration: float = 20.0
    cadence: float = 0.01
    atlas_top_base: tuple[float, ...] = (30.0, 40.0, 50.0, 60.0)
    atlas_top_tip: tuple[float, ...] = (60.0, 80.0, 100.0, 120.0)
    atlas_adaptation: tuple[float, ...] = (1.0,)
    validation_suites: tuple[str, ...] = (
        "bvp-oracle",
        "dynamic-steady",
        "length-constant",
        "static-curvature",
        "energy-decay",
        "lyapunov",
        "timescale",
        "convergence",
    )

    def canonical(self) -> dict:
        """Plain nested dict with every field resolved (for round-trips)."""
        return {
            "kind": self.kind,
            "geometry": asdict(self.geometry),
            "cable": {
                "tau": self.cable.tau,
                "tau_adapt": self.cable.tau_adapt,
                "length_constant": self.cable.lam,
                "adaptation": self.cable.b,
            },
            "drag": {
                "tangential": self.drag.c_tangential,
                "normal": self.drag.c_normal,
                "mode": self.drag.mode,
            },
            "control": asdict(self.control),
            "thresholds": asdict(self.thresholds),
            "rest_voltages": {
                "top": list(self.rest_top),
                "bottom": list(self.rest_bottom),
            },
            "target": {"position": list(self.target)},
            "run": {"duration": self.duration, "cadence": self.cadence},
            "atlas": {
                "top_base": list(self.atlas_top_base),
                "top_tip": list(self.atlas_top_tip),
                "adaptation": list(self.atlas_adaptation),
            },
            "validation": {"suites": list(self.validation_suites)},
        }


def _take(table: dict, key: str, default, caster, context: str):
    if key not in table:
        return default
    try:
        return caster(table.pop(key))
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{context}.{key}", str(exc)) from exc


def _pair(value) -> tuple[float, float]:
    a, b = value
    return (float(a), float(b))


def _floats(value) -> tuple[float, ...]:
    return tuple(float(x) for x in value)


def parse_scenario(data: dict) -> Scenario:
    """Build a Scenario from a parsed config mapping; unknown keys error."""
    data = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    kind = data.pop("kind", "reaching")
    if kind not in ("atlas", "reaching", "validation"):
        raise ConfigurationError("kind", f"unknown scenario kind {kind!r}")

    geo_t = data.pop("geometry", {})
    geometry = GeometryConfig(
        length=_take(geo_t, "length", 0.2, float, "geometry"),
        elements=_take(geo_t, "elements", 100, int, "geometry"),
        base_radius=_take(geo_t, "base_radius", 0.01, float, "geometry"),
        tip_radius=_take(geo_t, "tip_radius", 0.001, float, "geometry"),
        youngs_modulus=_take(geo_t, "youngs_modulus", 1.0e4, float, "geometry"),
        density=_take(geo_t, "density", 1042.0, float, "geometry"),
        damping=_take(geo_t, "damping", 0.01, float, "geometry"),
        rotational_damping=_take(geo_t, "rotational_damping", 1.5e-3, float, "geometry"),
        max_couple=_take(geo_t, "max_couple", None, float, "geometry"),
    )
    cab_t = data.pop("cable", {})
    cable = CableParams(
        tau=_take(cab_t, "tau", 0.04, float, "cable"),
        tau_adapt=_take(cab_t, "tau_adapt", 0.4, float, "cable"),
        lam=_take(cab_t, "length_constant", 0.1, float, "cable"),
        b=_take(cab_t, "adaptation", 1.0, float, "cable"),
    )
    drag_t = data.pop("drag", {})
    drag = DragModel(
        c_tangential=_take(drag_t, "tangential", 0.01, float, "drag"),
        c_normal=_take(drag_t, "normal", 0.1, float, "drag"),
        mode=_take(drag_t, "mode", "linear", str, "drag"),
    )
    ctl_t = data.pop("control", {})
    control = ControlConfig(
        law=_take(ctl_t, "law", "sensory-feedback", str, "control"),
        mu=_take(ctl_t, "mu", 500.0, float, "control"),
        mu_star=_take(ctl_t, "mu_star", 3e-4, float, "control"),
        beta=_take(ctl_t, "beta", 10.0, float, "control"),
        epsilon=_take(ctl_t, "epsilon", 1e-3, float, "control"),
        current_cap=_take(ctl_t, "current_cap", 1e4, float, "control"),
    )
    thr_t = data.pop("thresholds", {})
    thresholds = ReachThresholds(
        touch_distance_frac=_take(thr_t, "touch_distance_frac", 0.01, float, "thresholds"),
        align=_take(thr_t, "align", 0.5, float, "thresholds"),
        speed=_take(thr_t, "speed", 0.05, float, "thresholds"),
    )
    rv_t = data.pop("rest_voltages", {})
    rest_top = _take(rv_t, "top", (65.0, 65.0), _pair, "rest_voltages")
    rest_bottom = _take(rv_t, "bottom", (40.0, 0.0), _pair, "rest_voltages")
    tgt_t = data.pop("target", {})
    target = _take(tgt_t, "position", (0.2, 0.1), _pair, "target")
    run_t = data.pop("run", {})
    duration = _take(run_t, "duration", 20.0, float, "run")
    cadence = _take(run_t, "cadence", 0.01, float, "run")
    if not duration > 0:
        raise ConfigurationError("run.duration", f"must be positive, got {duration}")
    if not 0 < cadence <= duration:
        raise ConfigurationError("run.cadence", f"must lie in (0, duration], got {cadence}")
    atl_t = data.pop("atlas", {})
    atlas_top_base = _take(atl_t, "top_base", (30.0, 40.0, 50.0, 60.0), _floats, "atlas")
    atlas_top_tip = _take(atl_t, "top_tip", (60.0, 80.0, 100.0, 120.0), _floats, "atlas")
    atlas_adaptation = _take(atl_t, "adaptation", (1.0,), _floats, "atlas")
    if "bottom" in atl_t:
        rest_bottom = _pair(atl_t.pop("bottom"))
    val_t = data.pop("validation", {})
    suites = _take(
        val_t, "suites", Scenario().validation_suites, lambda v: tuple(str(x) for x in v),
        "validation",
    )

    for context, table in (
        ("geometry", geo_t), ("cable", cab_t), ("drag", drag_t), ("control", ctl_t),
        ("thresholds", thr_t), ("rest_voltages", rv_t), ("target", tgt_t),
        ("run", run_t), ("atlas", atl_t), ("validation", val_t),
    ):
        if table:
            raise ConfigurationError(context, f"unknown keys {sorted(table)}")
    if data:
        raise ConfigurationError("config", f"unknown sections {sorted(data)}")

    return Scenario(
        kind=kind,
        geometry=geometry,
        cable=cable,
        drag=drag,
        control=control,
        thresholds=thresholds,
        rest_top=rest_top,
        rest_bottom=rest_bottom,
        target=target,
        duration=duration,
        cadence=cadence,
        atlas_top_base=atlas_top_base,
        atlas_top_tip=atlas_top_tip,
        atlas_adaptation=atlas_adaptation,
        validation_suites=suites,
    )


def load_scenario(path: str | Path) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(tomllib.load(fh))


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def scenario_to_toml(scenario: Scenario) -> str:
    """Canonical TOML text for a scenario (keys in schema order)."""
    doc = scenario.canonical()
    lines = [f"kind = {_toml_value(doc.pop('kind'))}", ""]
    for section, table in doc.items():
        body = [
            f"{key} = {_toml_value(val)}" for key, val in table.items() if val is not None
        ]
        lines.append(f"[{section}]")
        lines.extend(body)
        lines.append("")
    return "\n".join(lines)


CSV_COLUMNS = (
    "t,node,s,r_x,r_y,theta,kappa,V_top,V_bottom,W_top,W_bottom,I_top,I_bottom,u_net"
)


def write_trajectory_csv(path: Path, traj: Trajectory, geometry: ArmGeometry) -> None:
    n = geometry.n
    with open(path, "w") as fh:
        fh.write(CSV_COLUMNS + "\n")
        for k, t in enumerate(traj.t):
            rod = traj.rod[k]
            kappa = rod.kappa
            kappa_nodes = np.concatenate(([kappa[0]], kappa, [kappa[-1]]))
            theta_nodes = rod.node_angles
            cols = (
                traj.v_top[k], traj.v_bottom[k], traj.w_top[k], traj.w_bottom[k],
                traj.i_top[k], traj.i_bottom[k], traj.u_net[k],
            )
            for i in range(n + 1):
                row = [
                    repr(float(t)), str(i), repr(float(geometry.s[i])),
                    repr(float(rod.r[i, 0])), repr(float(rod.r[i, 1])),
                    repr(float(theta_nodes[i])), repr(float(kappa_nodes[i])),
                ]
                row.extend(repr(float(c[i])) for c in cols)
                fh.write(",".join(row) + "\n")
            d = traj.diagnostics[k]
            diag = [
                repr(float(t)), "-1", repr(float(d.s_bar_over_L)),
                repr(float(d.kappa_tip)), repr(float(d.energy)),
                repr(float(d.lyap_neural)), repr(float(d.max_speed)),
                repr(float(d.dist)), repr(float(STATUS_CODES[d.reach_status])),
                "0.0", "0.0", "0.0", "0.0", "0.0",
            ]
            fh.write(",".join(diag) + "\n")


def run_atlas(scenario: Scenario, outdir: str | Path) -> dict:
    """Evaluate the rest-shape grid and write atlas.csv plus atlas_index.json.

    Cells are the product of atlas_top_base x atlas_top_tip x
    atlas_adaptation with the bottom cable fixed at rest_bottom. Per-cell
    solver errors are recorded in the index and do not stop the sweep.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    geometry = build_arm(scenario.geometry)
    s = geometry.s
    L = geometry.L

    cells = []
    for b in scenario.atlas_adaptation:
        for v0 in scenario.atlas_top_base:
            for vL in scenario.atlas_top_tip:
                cells.append((v0, vL, b))

    def solve_cell(cell):
        v0, vL, b = cell
        params = CableParams(
            tau=scenario.cable.tau, tau_adapt=scenario.cable.tau_adapt,
            lam=scenario.cable.lam, b=b,
        )
        return rest_shape(
            v0, vL, scenario.rest_bottom[0], scenario.rest_bottom[1], params, geometry
        )

    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=4) as pool:
        results = []
        for cell, future in [(c, pool.submit(solve_cell, c)) for c in cells]:
            try:
                results.append((cell, future.result(), None))
            except NeuroarmError as exc:
                results.append((cell, None, str(exc)))

    window = s >= 0.9 * L
    index = {"cells": [], "columns": CSV_ATLAS_COLUMNS.split(",")}
    with open(outdir / "atlas.csv", "w") as fh:
        fh.write(CSV_ATLAS_COLUMNS + "\n")
        for cell_id, (cell, shape, error) in enumerate(results):
            v0, vL, b = cell
            entry = {
                "cell": cell_id,
                "v0_top": v0,
                "vL_top": vL,
                "v0_bottom": scenario.rest_bottom[0],
                "vL_bottom": scenario.rest_bottom[1],
                "adaptation": b,
                "error": error,
            }
            if shape is not None:
                kappa_tip = float(np.trapezoid(shape.kappa[window], s[window]) / (0.1 * L))
                total_curl = float(np.trapezoid(np.abs(shape.kappa), s))
                entry["kappa_tip"] = kappa_tip
                entry["total_curl"] = total_curl
                act_top = sigma(shape.eq_top(s))
                act_bottom = sigma(shape.eq_bottom(s))
                for i in range(geometry.n + 1):
                    fh.write(
                        ",".join(
                            [
                                str(cell_id), repr(v0), repr(vL),
                                repr(scenario.rest_bottom[0]), repr(scenario.rest_bottom[1]),
                                repr(b), str(i), repr(float(s[i])),
                                repr(float(shape.kappa[i])),
                                repr(float(shape.r[i, 0])), repr(float(shape.r[i, 1])),
                                repr(float(shape.theta[i])),
                                repr(float(act_top[i])), repr(float(act_bottom[i])),
                            ]
                        )
                        + "\n"
                    )
            index["cells"].append(entry)
    with open(outdir / "atlas_index.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
    return index


CSV_ATLAS_COLUMNS = (
    "cell,v0_top,vL_top,v0_bottom,vL_bottom,adaptation,node,s,kappa,r_x,r_y,theta,"
    "sigma_top,sigma_bottom"
)


def build_reaching_sim(scenario: Scenario) -> CoupledSimulation:
    """Set up the coupled simulation for a reaching run (free-free cables)."""
    geometry = build_arm(scenario.geometry)
    sim = CoupledSimulation(
        geometry,
        scenario.cable,
        control=scenario.control,
        target=np.array(scenario.target),
        drag=scenario.drag,
        thresholds=scenario.thresholds,
        law=scenario.control.law,
    )
    rest = rest_shape(
        scenario.rest_top[0], scenario.rest_top[1],
        scenario.rest_bottom[0], scenario.rest_bottom[1],
        scenario.cable, geometry,
    )
    sim.initialize_from_rest(rest)
    return sim


def run_reaching(scenario: Scenario, outdir: str | Path) -> dict:
    """Integrate the reaching scenario and write trajectory.csv + summary.json.

    On integration failure the partial trajectory is still written along
    with an error record in the summary.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    sim = build_reaching_sim(scenario)
    error = None
    t0 = time.perf_counter()
    try:
        traj = sim.run(scenario.duration, scenario.cadence)
    except NeuroarmError as exc:
        error = str(exc)
        traj = getattr(exc, "partial", None) or Trajectory()
    write_trajectory_csv(outdir / "trajectory.csv", traj, sim.geometry)
    summary = {
        "law": sim.law,
        "error": error,
        "final_status": traj.diagnostics[-1].reach_status if traj.diagnostics else None,
        "final_s_bar_over_L": traj.diagnostics[-1].s_bar_over_L if traj.diagnostics else None,
        "kappa_tip_initial": traj.diagnostics[0].kappa_tip if traj.diagnostics else None,
        "kappa_tip_final": traj.diagnostics[-1].kappa_tip if traj.diagnostics else None,
        "max_speed_final": traj.diagnostics[-1].max_speed if traj.diagnostics else None,
        "dt": sim.dt,
        "samples": len(traj.t),
        "runtime_s": time.perf_counter() - t0,
    }
    with open(outdir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return summary


def run_validation(scenario: Scenario, outdir: str | Path) -> dict:
    """Execute the configured oracle suites; nonzero exit is the CLI's job."""
    from . import validation as V

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    geometry = build_arm(scenario.geometry)  # validates config before any suite
    runners = {
        "bvp-oracle": lambda: V.suite_bvp_oracle(scenario.cable, geometry.L),
        "dynamic-steady": lambda: V.suite_dynamic_steady(scenario.cable, geometry.L),
        "length-constant": lambda: V.suite_length_constant(scenario.cable),
        "static-curvature": lambda: V.suite_static_curvature(scenario),
        "energy-decay": lambda: V.suite_energy_decay(scenario),
        "lyapunov": lambda: V.suite_lyapunov(scenario),
        "timescale": lambda: V.suite_timescale(scenario),
        "convergence": lambda: V.suite_convergence(scenario.geometry),
    }
    report = {"suites": [], "passed": True}
    for name in scenario.validation_suites:
        if name not in runners:
            raise ConfigurationError("validation.suites", f"unknown suite {name!r}")
        result = runners[name]()
        report["suites"].append(result)
        report["passed"] = report["passed"] and bool(result["passed"])
    with open(outdir / "validation.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=str)
    return report


def run_scenario(scenario: Scenario, outdir: str | Path) -> tuple[int, dict]:
    """Dispatch on scenario kind; returns (exit_code, report)."""
    if scenario.kind == "atlas":
        report = run_atlas(scenario, outdir)
        code = 0 if all(c["error"] is None for c in report["cells"]) else 1
        return code, report
    if scenario.kind == "reaching":
        report = run_reaching(scenario, outdir)
        return (0 if report["error"] is None else 1), report
    report = run_validation(scenario, outdir)
    return (0 if report["passed"] else 1), report
