"""Command-line interface.

    shbsim list
    shbsim describe <scenario>
    shbsim run <config.json> [--seed N] [--out DIR] [--threads N] [--no-plots]

`run` accepts a config document or a previously emitted manifest.  Exit code
0 on success; on failure a machine-readable JSON error object goes to stderr
(2 = invalid config, 3 = unknown scenario, 4 = numerical failure).
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import load_config_document
from .errors import ConfigError, NumericalError
from .scenarios import (UnknownScenarioError, resolve_config, run_scenario,
                        scenario_defaults, scenario_list)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNKNOWN_SCENARIO = 3
EXIT_NUMERICAL = 4


def _emit_error(kind: str, message: str, scenario: str | None = None) -> None:
    doc = {"error": {"type": kind, "message": message}}
    if scenario:
        doc["error"]["scenario"] = scenario
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shbsim",
        description="Spectral-hole-burning simulator for a lossy cavity "
                    "coupled to an inhomogeneously broadened emitter ensemble.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a JSON config or manifest")
    p_run.add_argument("config", help="path to the config document")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=None, help="override the output directory")
    p_run.add_argument("--threads", type=int, default=1,
                       help="worker processes for grid scans")
    p_run.add_argument("--no-plots", action="store_true",
                       help="skip figure rendering")

    sub.add_parser("list", help="list registered scenarios")

    p_desc = sub.add_parser("describe", help="print a scenario's default config")
    p_desc.add_argument("scenario")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "list":
        for item in scenario_list():
            print(f"{item['name']:8s} {item['description']}")
        return EXIT_OK

    if args.command == "describe":
        try:
            print(json.dumps(scenario_defaults(args.scenario), indent=2, sort_keys=True))
        except UnknownScenarioError:
            _emit_error("unknown_scenario", f"no scenario named {args.scenario!r}")
            return EXIT_UNKNOWN_SCENARIO
        return EXIT_OK

    # run
    scenario_name = None
    try:
        doc = load_config_document(args.config)
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.out is not None:
            doc["output_dir"] = args.out
        if args.no_plots:
            doc["plots"] = False
        scenario_name = doc.get("scenario")
        cfg = resolve_config(doc)
        manifest = run_scenario(cfg, out_dir=args.out, n_workers=max(1, args.threads))
    except UnknownScenarioError as exc:
        _emit_error("unknown_scenario", f"no scenario named {exc.args[0]!r}")
        return EXIT_UNKNOWN_SCENARIO
    except ConfigError as exc:
        _emit_error("invalid_config", str(exc), scenario_name)
        return EXIT_CONFIG
    except NumericalError as exc:
        _emit_error("numerical_error", str(exc), scenario_name)
        return EXIT_NUMERICAL

    for name in sorted(manifest["outputs"]):
        print(name)
    for name in manifest["figures"]:
        print(name)
    print("manifest.json")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
