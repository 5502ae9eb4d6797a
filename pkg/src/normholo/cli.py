"""Command-line front end; writes deterministic JSON reports.

Exit codes: 0 all analyses passed, 1 an analysis failed or hard-errored
(report still written), 2 configuration did not parse.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import NormholoError
from .report import (KNOWN_ANALYSES, Report, ScenarioConfig, run_scenario)

_SEED_ENV = "NORMHOLO_SEED"


def _default_seed() -> int:
    raw = os.environ.get(_SEED_ENV, "")
    try:
        return int(raw) if raw else 0
    except ValueError:
        return 0


def _add_common(p: argparse.ArgumentParser, rep_point: bool = True) -> None:
    if rep_point:
        p.add_argument("--rep", default="",
                       help="representation: sl-so:<r> or "
                            "product:sl-so:<r1>,sl-so:<r2>,...")
        p.add_argument("--point", default="",
                       help="base point: veronese | diag:<v1,v2,...> | "
                            "random-regular:<seed>; products take one "
                            "factor spec per block, ';'-separated")
    p.add_argument("--seed", type=int, default=None,
                   help=f"RNG seed (default from ${_SEED_ENV}, else 0)")
    p.add_argument("--config", default=None,
                   help="JSON file merged under the command-line flags")
    p.add_argument("--out", default=None,
                   help="write the report here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="normholo",
        description="orbit geometry and normal holonomy analyses")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run selected analyses on one orbit")
    _add_common(p)
    p.add_argument("--do", default="orbit",
                   help="comma list from: " + ",".join(KNOWN_ANALYSES))

    p = sub.add_parser("verify-veronese", help="fact suite for one n")
    _add_common(p, rep_point=False)
    p.add_argument("--n", type=int, required=True, help="dimension, 2..6")

    p = sub.add_parser("tube-spectrum",
                       help="formula vs patch tube spectra, plus the "
                            "derivative and caustic checks")
    _add_common(p)
    p.add_argument("--direction", default="canonical",
                   help="canonical | seed:<k>")
    p.add_argument("--curve", default=None,
                   help="JSON list of [generatorIndex, t] segments")
    p.add_argument("--step", type=float, default=None,
                   help="transport step for the curve")

    p = sub.add_parser("coxeter",
                       help="curvature normals and the reflection group")
    _add_common(p)

    p = sub.add_parser("transport-audit",
                       help="step-halving convergence audit of transport")
    _add_common(p)
    p.add_argument("--step", type=float, default=None,
                   help="baseline transport step")

    p = sub.add_parser("sweep", help="one analysis over a grid")
    _add_common(p, rep_point=False)
    p.add_argument("--analysis", default="veronese-facts",
                   choices=list(KNOWN_ANALYSES))
    p.add_argument("--ns", default=None,
                   help="comma list of n values (veronese-facts)")
    p.add_argument("--points", default=None,
                   help="';'-separated point specs (other analyses)")
    p.add_argument("--rep", default="", help="representation for --points")
    return top


def _config_from_args(args: argparse.Namespace) -> dict:
    raw: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw.update(json.load(fh))
    # explicit flags override file values
    for key in ("rep", "point", "n", "direction", "step", "out"):
        val = getattr(args, key, None)
        if val not in (None, ""):
            raw[key] = val
    if getattr(args, "curve", None):
        raw["curve"] = json.loads(args.curve)
    if args.seed is not None:
        raw["seed"] = args.seed
    elif "seed" not in raw:
        raw["seed"] = _default_seed()
    return raw


def _emit(report: Report, out: str | None) -> None:
    text = report.document_text()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _run_single(raw: dict, analyses: tuple) -> int:
    raw = dict(raw)
    raw["analyses"] = list(analyses)
    out = raw.pop("out", None)
    try:
        config = ScenarioConfig.from_dict(raw)
    except (NormholoError, ValueError, TypeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    report = run_scenario(config)
    _emit(report, out)
    return report.exit_code


def _run_sweep(args: argparse.Namespace) -> int:
    raw = _config_from_args(args)
    out = raw.pop("out", None)
    reports = []
    try:
        if args.analysis == "veronese-facts":
            if not args.ns:
                raise ValueError("sweep over veronese-facts needs --ns")
            grid = [int(x) for x in args.ns.split(",")]
            for n in grid:
                cfg = dict(raw)
                cfg.pop("n", None)
                cfg.update(n=n, analyses=["veronese-facts"])
                reports.append(run_scenario(ScenarioConfig.from_dict(cfg)))
        else:
            if not args.points or not args.rep:
                raise ValueError("sweep needs --rep and --points")
            for spec in args.points.split(";"):
                cfg = dict(raw)
                cfg.update(rep=args.rep, point=spec.strip(),
                           analyses=[args.analysis])
                reports.append(run_scenario(ScenarioConfig.from_dict(cfg)))
    except (NormholoError, ValueError, TypeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2

    bodies = [r.body() for r in reports]
    doc = {"schemaVersion": bodies[0]["schemaVersion"] if bodies else 1,
           "toolVersion": bodies[0]["toolVersion"] if bodies else "",
           "sweep": bodies,
           "summary": {"pass": all(r.passed for r in reports),
                       "failures": [i for i, r in enumerate(reports)
                                    if not r.passed]},
           "timings": [r.timings for r in reports]}
    from .report import _render
    text = _render(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    if any(r.hard_error for r in reports):
        return 1
    return 0 if all(r.passed for r in reports) else 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags already; normalize other codes
        return int(exc.code or 0)

    if args.command == "sweep":
        return _run_sweep(args)

    raw = _config_from_args(args)
    if args.command == "analyze":
        wanted = tuple(x.strip() for x in args.do.split(",") if x.strip())
        return _run_single(raw, wanted)
    if args.command == "verify-veronese":
        return _run_single(raw, ("veronese-facts",))
    if args.command == "tube-spectrum":
        return _run_single(raw, ("tube",))
    if args.command == "coxeter":
        return _run_single(raw, ("coxeter",))
    if args.command == "transport-audit":
        return _run_single(raw, ("transport-audit",))
    raise AssertionError("unhandled command")


if __name__ == "__main__":
    sys.exit(main())
