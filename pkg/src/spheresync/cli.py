"""Command-line interface: simulate, validate-signal, sweep, reproduce.

Exit codes: 0 for theorem-consistent or neutral runs, 1 for usage/config/IO
problems, 2 when certified hypotheses meet a failed conclusion (a certificate
violation worth investigating).
"""
from __future__ import annotations

import argparse
import copy
import csv
import itertools
import sys
from pathlib import Path

from .analysis import certify
from .config import apply_override, build_scenario, load_config, write_config
from .dynamics import simulate
from .errors import ConfigError, SphereSyncError
from .network import validate_dwell
from .presets import PRESET_NAMES, preset_config
from .traceio import write_report, write_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


def _emit(quiet: bool, *lines: str) -> None:
    if not quiet:
        for line in lines:
            print(line)


def _resolve(out_dir: str, path: str) -> Path:
    p = Path(path)
    return p if p.is_absolute() else Path(out_dir) / p


def _run_scenario(raw: dict, out_dir: str, quiet: bool) -> int:
    """Build, simulate, certify, and write trace + report. Core of simulate/reproduce."""
    scenario, output, seed = build_scenario(raw)
    trace = simulate(scenario)
    report = certify(trace, scenario)

    trace_path = _resolve(out_dir, output.trace_path)
    report_path = _resolve(out_dir, output.report_path)
    for p in (trace_path, report_path):
        p.parent.mkdir(parents=True, exist_ok=True)
    keep = [t for t in scenario.signal.switch_times if t <= scenario.end_time]
    write_trace(trace_path, trace, stride=output.sample_stride, keep_times=keep)
    write_report(report_path, report, scenario, trace, seed=seed)

    _emit(quiet,
          f"trace:   {trace_path}",
          f"report:  {report_path}",
          f"verdict: {report.verdict}",
          f"final sync error: {report.final_sync_error:.3e}"
          + (f" (reached {report.epsilon:g} at t = {report.time_to_epsilon:g})"
             if report.time_to_epsilon is not None else ""))
    return EXIT_VIOLATION if report.verdict == "certificate_violation" else EXIT_OK


def _load_with_overrides(args) -> dict:
    raw = load_config(args.config)
    for assignment in args.overrides:
        apply_override(raw, assignment)
    if args.seed is not None:
        raw.setdefault("scenario", {})["seed"] = args.seed
    return raw


def cmd_simulate(args) -> int:
    return _run_scenario(_load_with_overrides(args), args.out, args.quiet)


def cmd_validate_signal(args) -> int:
    raw = _load_with_overrides(args)
    scenario, _, _ = build_scenario(raw)
    if scenario.dwell is None:
        raise ConfigError("[signal] carries no dwell spec to validate against")
    report = validate_dwell(scenario.signal, scenario.dwell, scenario.end_time)
    _emit(args.quiet,
          f"dwell check: {'ok' if report.ok else 'VIOLATED'}",
          f"worst pair:  {report.worst_pair}",
          f"margin:      {report.margin}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _parse_seeds(text: str) -> list[int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError as exc:
            raise ConfigError(f"bad seed range {text!r}; expected LO..HI") from exc
    try:
        return [int(s) for s in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad seed list {text!r}") from exc


def cmd_sweep(args) -> int:
    base = load_config(args.config)
    seeds = _parse_seeds(args.seeds)
    axes = []
    for assignment in args.overrides:
        key, sep, values = assignment.partition("=")
        if not sep:
            raise ConfigError(f"override {assignment!r} is not KEY=VALUE")
        axes.append([(key, v) for v in values.split(",")])

    rows = []
    statuses = set()
    for combo in itertools.product(*axes):
        for seed in seeds:
            raw = copy.deepcopy(base)
            label = " ".join(f"{k}={v}" for k, v in combo)
            row = {"overrides": label, "seed": seed, "verdict": "", "final_sync_error": "",
                   "time_to_epsilon": "", "monotonicity_violations": "", "error": ""}
            try:
                for k, v in combo:
                    apply_override(raw, f"{k}={v}")
                raw.setdefault("scenario", {})["seed"] = seed
                scenario, _, _ = build_scenario(raw)
                trace = simulate(scenario)
                report = certify(trace, scenario)
                row["verdict"] = report.verdict
                row["final_sync_error"] = f"{report.final_sync_error:.17g}"
                row["time_to_epsilon"] = ("" if report.time_to_epsilon is None
                                          else f"{report.time_to_epsilon:.17g}")
                row["monotonicity_violations"] = str(report.monotonicity_violations)
                statuses.add(EXIT_VIOLATION if report.verdict == "certificate_violation"
                             else EXIT_OK)
            except (SphereSyncError, OSError) as exc:
                row["error"] = str(exc)
                statuses.add(EXIT_USAGE)
            rows.append(row)
    worst = (EXIT_USAGE if EXIT_USAGE in statuses
             else EXIT_VIOLATION if EXIT_VIOLATION in statuses else EXIT_OK)

    Path(args.out).mkdir(parents=True, exist_ok=True)
    table_path = Path(args.out) / "sweep.csv"
    fields = ["overrides", "seed", "verdict", "final_sync_error", "time_to_epsilon",
              "monotonicity_violations", "error"]
    with open(table_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    _emit(args.quiet, f"sweep table: {table_path} ({len(rows)} runs)")
    return worst


def cmd_reproduce(args) -> int:
    try:
        raw = preset_config(args.preset)
    except KeyError:
        print(f"unknown preset {args.preset!r}; available: {', '.join(PRESET_NAMES)}",
              file=sys.stderr)
        return EXIT_USAGE
    Path(args.out).mkdir(parents=True, exist_ok=True)
    config_path = Path(args.out) / f"{args.preset}-config.toml"
    write_config(config_path, raw)
    _emit(args.quiet, f"config:  {config_path}")
    return _run_scenario(load_config(config_path), args.out, args.quiet)


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    if config_required:
        parser.add_argument("--config", required=True, help="scenario config file (TOML)")
    parser.add_argument("--out", default=".", help="directory for output files")
    parser.add_argument("--seed", type=int, default=None,
                        help="override [scenario].seed")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key (repeatable)")
    parser.add_argument("--quiet", action="store_true", help="suppress the summary")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spheresync",
        description="Synchronization of unit vectors on spheres under switching topologies")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario, write trace and report")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate-signal", help="check a signal against its dwell spec")
    _add_common(p)
    p.set_defaults(func=cmd_validate_signal)

    p = sub.add_parser("sweep", help="run overrides x seeds, aggregate one table")
    _add_common(p)
    p.add_argument("--seeds", default="0..0",
                   help="seed range LO..HI (inclusive) or comma list")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="run a named preset end to end")
    p.add_argument("preset", help=f"one of: {', '.join(PRESET_NAMES)}")
    _add_common(p, config_required=False)
    p.set_defaults(func=cmd_reproduce)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SphereSyncError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
