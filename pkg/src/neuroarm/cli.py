"""Command-line front end: atlas, reach, validate, describe."""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import NeuroarmError
from .harness import Scenario, load_scenario, run_scenario, scenario_to_toml


def _add_run_parser(sub, name: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("config", nargs="?", default=None, help="scenario TOML (defaults apply if omitted)")
    p.add_argument("-o", "--outdir", required=True, help="output directory")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="neuroarm",
        description="Planar neuromuscular soft-arm simulator",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    _add_run_parser(sub, "atlas", "rest-shape grid over boundary voltages / adaptation")
    _add_run_parser(sub, "reach", "coupled reaching run under the configured control law")
    _add_run_parser(sub, "validate", "run the numerical validation suites")
    sub.add_parser("describe", help="print version and the config schema with defaults")

    args = parser.parse_args(argv)
    if args.verb == "describe":
        print(f"neuroarm {__version__}")
        print()
        print("# Config schema (TOML). Every key is optional; the values below")
        print("# are the defaults and reproduce the reference arm.")
        print(scenario_to_toml(Scenario()))
        return 0

    try:
        scenario = load_scenario(args.config) if args.config else Scenario()
        kind = {"atlas": "atlas", "reach": "reaching", "validate": "validation"}[args.verb]
        if scenario.kind != kind:
            from dataclasses import replace

            scenario = replace(scenario, kind=kind)
        code, report = run_scenario(scenario, args.outdir)
    except NeuroarmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.verb == "validate":
        for suite in report["suites"]:
            mark = "PASS" if suite["passed"] else "FAIL"
            print(f"{mark} {suite['name']} ({suite['runtime_s']:.1f}s)")
    elif args.verb == "atlas":
        errors = sum(1 for c in report["cells"] if c["error"] is not None)
        print(f"atlas: {len(report['cells'])} cells, {errors} errors -> {args.outdir}")
    else:
        brief = {k: report[k] for k in ("law", "final_status", "final_s_bar_over_L",
                                        "kappa_tip_initial", "kappa_tip_final", "error")}
        print(json.dumps(brief, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
