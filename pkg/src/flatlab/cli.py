"""Command-line entry point: one binary, a subcommand per subsystem, plus
`run` for scenario files and `list-examples` for the shipped catalog.

Exit codes: 0 when every verdict passes, 1 on a failing verdict, 2 on input
or module errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .reports import write_report
from .scenarios import (ParseError, SchemaError, examples_dir, list_examples,
                        load_scenario, run_scenario)

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--out", help="write the JSON report to this path")
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the scenario's primary tolerance")
    parser.add_argument("--grid", type=int, default=None,
                        help="override the grid resolution where applicable")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv additionally writes table data next to the report")
    parser.add_argument("--figures", metavar="DIR", default=None,
                        help="render report tables as PNG files into DIR")


def _apply_overrides(doc: dict, args) -> dict:
    if args.tol is not None:
        tols = dict(doc.get("tolerances", {}))
        for key in list(tols) or ["residual"]:
            tols[key] = args.tol
        doc["tolerances"] = tols
    if args.grid is not None:
        payload = dict(doc["payload"])
        for key in ("n_r", "n_t"):
            if key in payload or doc["kind"] == "dbar":
                payload[key] = args.grid if key == "n_r" else max(4, args.grid - 1)
        doc["payload"] = payload
    return doc


def _execute(doc: dict, args) -> int:
    doc = _apply_overrides(doc, args)
    try:
        report = run_scenario(doc, seed=args.seed)
    except (ParseError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # module-propagated errors are input errors here
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    write_report(report, args.out, fmt=args.format, figures_dir=args.figures)
    for line in report.summary_lines():
        print(line)
    if args.out:
        print(f"report: {args.out}")
    return 0 if report.passed else 1


def _inline_scenario(kind: str, payload: dict, tolerances: Optional[dict] = None) -> dict:
    doc = {"schema_version": 1, "kind": kind, "seed": 0, "payload": payload}
    if tolerances:
        doc["tolerances"] = tolerances
    return doc


def _payload_from_args(args) -> dict:
    if args.scenario:
        return load_scenario(args.scenario)["payload"]
    if args.params:
        with open(args.params) as fh:
            return json.load(fh)
    if args.json:
        return json.loads(args.json)
    return {}


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="flatlab",
        description="desk-scale lab for local-system jump loci, theta identities, "
                    "flat-bundle families, and weighted dbar experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario", help="path to a scenario JSON document")
    _add_common(p_run)

    sub.add_parser("list-examples", help="catalog of shipped scenarios")

    p_theta = sub.add_parser("theta", help="theta-function operations")
    p_theta.add_argument("op", choices=("eval", "quasi", "triple", "fit"))
    p_theta.add_argument("--scenario", help="scenario file supplying the payload")
    p_theta.add_argument("--params", help="JSON file with the payload")
    p_theta.add_argument("--json", help="inline JSON payload")
    _add_common(p_theta)

    p_dbar = sub.add_parser("dbar", help="punctured-disk dbar experiments")
    p_dbar.add_argument("op", choices=("cutoff", "pushforward", "solve", "ot-constant",
                                       "ot-extend", "curvature", "two-weight"))
    p_dbar.add_argument("--scenario", help="scenario file supplying the payload")
    p_dbar.add_argument("--params", help="JSON file with the payload")
    p_dbar.add_argument("--json", help="inline JSON payload")
    _add_common(p_dbar)

    args = parser.parse_args(argv)

    if args.command == "list-examples":
        for entry in list_examples():
            print(f"{entry['name']:<20} [{entry['kind']}] {entry['description']}")
        print(f"examples directory: {examples_dir()}")
        return 0

    if args.command == "run":
        try:
            doc = load_scenario(args.scenario)
        except (ParseError, SchemaError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return _execute(doc, args)

    if args.command in ("theta", "dbar"):
        try:
            payload = _payload_from_args(args)
        except (OSError, json.JSONDecodeError, ParseError, SchemaError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        payload.setdefault("op", args.op)
        payload["op"] = args.op
        doc = _inline_scenario(args.command, payload)
        return _execute(doc, args)

    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
