import json
from dataclasses import replace

import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from neuroarm.errors import ConfigurationError
from neuroarm.harness import (
    Scenario,
    load_scenario,
    parse_scenario,
    run_atlas,
    run_reaching,
    run_validation,
    scenario_to_toml,
)

SHORT_RUN = {"run": {"duration": 0.2, "cadence": 0.05}}


class TestConfig:
    def test_defaults_reproduce_reference_setup(self):
        s = Scenario()
        assert s.geometry.length == 0.2
        assert s.geometry.base_radius == 0.01
        assert s.geometry.tip_radius == 0.001
        assert s.geometry.density == 1042.0
        assert s.geometry.youngs_modulus == 1.0e4
        assert s.geometry.damping == 0.01
        assert s.cable.tau == 0.04
        assert s.cable.tau_adapt == 0.4
        assert s.cable.lam == 0.1
        assert s.control.mu == 500.0
        assert s.control.beta == 10.0
        assert s.rest_top == (65.0, 65.0)
        assert s.rest_bottom == (40.0, 0.0)
        assert s.target == (0.2, 0.1)

    def test_empty_config_parses_to_defaults(self):
        assert parse_scenario({}) == Scenario()

    def test_round_trip(self):
        s0 = parse_scenario({"control": {"mu": 123.0}, "run": {"duration": 3.0}})
        text = scenario_to_toml(s0)
        s1 = parse_scenario(tomllib.loads(text))
        assert s1 == s0
        assert parse_scenario(tomllib.loads(scenario_to_toml(s1))) == s1

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigurationError):
            parse_scenario({"geometry": {"radius": 0.01}})
        with pytest.raises(ConfigurationError):
            parse_scenario({"mystery": {}})

    def test_bad_kind(self):
        with pytest.raises(ConfigurationError):
            parse_scenario({"kind": "flight"})

    def test_bad_cadence(self):
        with pytest.raises(ConfigurationError):
            parse_scenario({"run": {"duration": 1.0, "cadence": 2.0}})

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "scn.toml"
        path.write_text('kind = "atlas"\n[cable]\nadaptation = 2.0\n')
        s = load_scenario(path)
        assert s.kind == "atlas"
        assert s.cable.b == 2.0


class TestAtlas:
    def test_reference_grid_16_cells(self, tmp_path):
        scenario = replace(Scenario(), kind="atlas")
        index = run_atlas(scenario, tmp_path)
        assert len(index["cells"]) == 16
        assert all(c["error"] is None for c in index["cells"])
        rows = (tmp_path / "atlas.csv").read_text().splitlines()
        assert rows[0].startswith("cell,")
        assert len(rows) == 1 + 16 * 101

    def test_adaptation_sweep_5_cells(self, tmp_path):
        scenario = replace(
            Scenario(), kind="atlas",
            atlas_top_base=(40.0,), atlas_top_tip=(80.0,),
            atlas_adaptation=(0.0, 0.5, 1.0, 1.5, 2.0),
        )
        index = run_atlas(scenario, tmp_path)
        assert len(index["cells"]) == 5
        curls = [c["total_curl"] for c in index["cells"]]
        assert all(a > b for a, b in zip(curls, curls[1:]))

    def test_single_cell_grid(self, tmp_path):
        scenario = replace(
            Scenario(), kind="atlas",
            atlas_top_base=(50.0,), atlas_top_tip=(90.0,), atlas_adaptation=(1.0,),
        )
        index = run_atlas(scenario, tmp_path)
        assert len(index["cells"]) == 1


class TestReaching:
    def test_short_run_outputs(self, tmp_path):
        scenario = parse_scenario(dict(SHORT_RUN))
        summary = run_reaching(scenario, tmp_path)
        assert summary["error"] is None
        assert summary["samples"] == 5
        body = (tmp_path / "trajectory.csv").read_text().splitlines()
        n_nodes = scenario.geometry.elements + 1
        assert len(body) == 1 + 5 * (n_nodes + 1)
        assert body[0] == (
            "t,node,s,r_x,r_y,theta,kappa,V_top,V_bottom,W_top,W_bottom,"
            "I_top,I_bottom,u_net"
        )
        diag_rows = [ln for ln in body[1:] if ln.split(",")[1] == "-1"]
        assert len(diag_rows) == 5
        assert json.loads((tmp_path / "summary.json").read_text())["law"] == "sensory-feedback"

    def test_determinism_byte_identical(self, tmp_path):
        scenario = parse_scenario(dict(SHORT_RUN))
        run_reaching(scenario, tmp_path / "a")
        run_reaching(scenario, tmp_path / "b")
        assert (tmp_path / "a/trajectory.csv").read_bytes() == (
            tmp_path / "b/trajectory.csv"
        ).read_bytes()

    def test_integration_failure_keeps_partial_output(self, tmp_path):
        # absurd drag breaks the explicit step; the run must report the
        # failure and still write the samples recorded before it
        scenario = parse_scenario(
            {"drag": {"normal": 1e9}, "run": {"duration": 0.5, "cadence": 0.05}}
        )
        summary = run_reaching(scenario, tmp_path)
        assert summary["error"] is not None
        assert "step" in summary["error"]
        body = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert len(body) >= 1 + scenario.geometry.elements + 2  # header + 1 sample

    def test_zero_gain_does_not_reach(self, tmp_path):
        # mu is required positive; the smallest useful gain never crosses the
        # activation threshold, which is the zero-actuation regime
        scenario = parse_scenario(
            {"control": {"mu": 1e-6}, "run": {"duration": 0.3, "cadence": 0.1}}
        )
        summary = run_reaching(scenario, tmp_path)
        assert summary["final_status"] == "not-reached"
        assert abs(summary["kappa_tip_final"] - summary["kappa_tip_initial"]) < 5.0


class TestValidation:
    def test_fast_suites_pass(self, tmp_path):
        scenario = replace(
            Scenario(), kind="validation",
            validation_suites=("length-constant", "convergence"),
        )
        report = run_validation(scenario, tmp_path)
        assert report["passed"]
        assert (tmp_path / "validation.json").exists()

    def test_invalid_geometry_fails_before_suites(self, tmp_path):
        scenario = replace(
            Scenario(), kind="validation",
            geometry=replace(Scenario().geometry, youngs_modulus=0.0),
        )
        with pytest.raises(ConfigurationError) as err:
            run_validation(scenario, tmp_path)
        assert err.value.field == "youngs_modulus"

    def test_unknown_suite_rejected(self, tmp_path):
        scenario = replace(Scenario(), kind="validation", validation_suites=("magic",))
        with pytest.raises(ConfigurationError):
            run_validation(scenario, tmp_path)

    def test_coarse_grid_reports_order(self, tmp_path):
        from neuroarm.geometry import GeometryConfig
        from neuroarm.validation import suite_convergence

        result = suite_convergence(GeometryConfig(elements=16))
        assert "observed_orders" in result
        assert result["observed_orders"][0] >= 1.0


class TestCli:
    def test_describe(self, capsys):
        from neuroarm.cli import main

        assert main(["describe"]) == 0
        out = capsys.readouterr().out
        assert "neuroarm" in out
        assert "[geometry]" in out

    def test_reach_verb(self, tmp_path, capsys):
        from neuroarm.cli import main

        cfg = tmp_path / "cfg.toml"
        cfg.write_text('[run]\nduration = 0.1\ncadence = 0.05\n')
        code = main(["reach", str(cfg), "-o", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "trajectory.csv").exists()

    def test_bad_config_exit_code(self, tmp_path):
        from neuroarm.cli import main

        cfg = tmp_path / "bad.toml"
        cfg.write_text('[geometry]\nyoungs_modulus = -5.0\n')
        assert main(["reach", str(cfg), "-o", str(tmp_path / "out")]) == 2
