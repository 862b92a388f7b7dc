"""Command-line entry point.

Subcommands: ``run``, ``replicate``, ``rates``, ``table1``, ``check``.
stdout carries only human-facing lines; data artifacts go to files whose
paths are printed.  Exit codes: 0 success, 2 validation/usage failure,
1 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .harness import ConfigValidationError, RateFitError, RunConfig
from .solvers import SolverRuntimeError

log = logging.getLogger("cgtoolkit")

# Overrides are limited to run-shape knobs; algorithmic parameters change
# only through config files so experiments stay auditable.
_OVERRIDABLE = ("seed", "epsilon", "max_iterations", "output_dir", "workers")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgtoolkit",
                                     description="composite conditional-gradient toolkit")
    parser.add_argument("--verbose", action="store_true", help="log run progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_overrides(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("-n", "--iterations", type=int, default=None, dest="max_iterations")
        p.add_argument("--output-dir", default=None, dest="output_dir")
        p.add_argument("--workers", type=int, default=None)

    p_run = sub.add_parser("run", help="validate and execute one config")
    p_run.add_argument("config", help="path to a YAML run config")
    add_overrides(p_run)

    p_rep = sub.add_parser("replicate", help="seeded replications of a stochastic config")
    p_rep.add_argument("config")
    p_rep.add_argument("--m", type=int, default=None, help="replication count")
    add_overrides(p_rep)

    p_rates = sub.add_parser("rates", help="fit convergence rates for trace CSVs")
    p_rates.add_argument("path", help="a trace CSV or a directory of them")

    p_t1 = sub.add_parser("table1", help="empirical complexity-order comparison suite")
    p_t1.add_argument("suite", nargs="?", default=None,
                      help="optional YAML file with a 'cells' list; default runs all cells")
    p_t1.add_argument("--cells", default=None, help="comma-separated cell names")
    p_t1.add_argument("--output-dir", default="runs", dest="output_dir")
    p_t1.add_argument("--workers", type=int, default=1)

    p_check = sub.add_parser("check", help="validate a config and certify constants")
    p_check.add_argument("config")
    p_check.add_argument("--samples", type=int, default=2000)
    return parser


def _load(path: str, overrides: dict) -> RunConfig:
    if not Path(path).is_file():
        raise ConfigValidationError([f"config file not found: {path}"])
    config = harness.load_config(path)
    applied = {k: v for k, v in overrides.items() if k in _OVERRIDABLE and v is not None}
    if applied:
        config = config.clone(**applied)
    return config


def _cmd_run(args) -> int:
    config = _load(args.config, vars(args))
    summary = harness.run(config)
    print(f"run {summary.name}: outcome={summary.outcome} iterations={summary.iterations} "
          f"terminal_gap={summary.terminal_gap:.6g} min_gap={summary.min_gap:.6g}")
    print(f"trace: {summary.trace_path}")
    print(f"summary: {Path(config.output_dir) / (config.name + '_summary.json')}")
    return 0


def _cmd_replicate(args) -> int:
    config = _load(args.config, vars(args))
    report = harness.replicate(config, args.m)
    line = (f"replicate {report.name}: m={report.replications} mean_gap={report.mean_gap:.6g} "
            f"std={report.std_gap:.6g} ci95_upper={report.ci95_upper:.6g}")
    if report.wide_ci_warning:
        line += " [wide-CI warning: small sample]"
    print(line)
    print(f"report: {report.report_path}")
    return 0


def _cmd_rates(args) -> int:
    target = Path(args.path)
    if target.is_dir():
        paths = sorted(target.glob("*_trace.csv"))
    elif target.is_file():
        paths = [target]
    else:
        raise ConfigValidationError([f"no trace file or directory at {args.path}"])
    if not paths:
        raise ConfigValidationError([f"no *_trace.csv files under {args.path}"])
    status = 0
    for path in paths:
        try:
            fit = harness.fit_trace_file(path)
        except RateFitError as exc:
            print(f"{path.name}: unfittable ({exc})")
            status = 1
            continue
        out = path.with_name(path.name.replace("_trace.csv", "_rate.json"))
        harness._write_json(fit.to_mapping(), out)
        print(f"{path.name}: kind={fit.kind} slope={fit.slope:.4f} r2={fit.r_squared:.4f} "
              f"-> {out}")
    return status


def _cmd_table1(args) -> int:
    selection = None
    if args.suite is not None:
        import yaml

        with open(args.suite, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh) or {}
        selection = doc.get("cells", [])
    if args.cells is not None:
        selection = [c.strip() for c in args.cells.split(",") if c.strip()]
    report = harness.table1_suite(selection, workers=args.workers,
                                  output_dir=args.output_dir)
    for cell in report["cells"]:
        if cell.get("status") == "missing":
            print(f"{cell['name']}: missing (no such cell)")
            continue
        fitted = cell.get("fitted", {})
        verdict = {True: "ok", False: "MISMATCH", None: "report-only"}[cell.get("ok")]
        print(f"{cell['name']}: {verdict} slope={fitted.get('loglog_slope', float('nan')):.3f} "
              f"semilog_r2={fitted.get('semilog_r2', float('nan')):.3f}")
    if "report_path" in report:
        print(f"report: {report['report_path']}")
    return 0


def _cmd_check(args) -> int:
    if not Path(args.config).is_file():
        raise ConfigValidationError([f"config file not found: {args.config}"])
    config = harness.load_config(args.config)
    result = harness.check_config(config, samples=args.samples)
    if not result["valid"]:
        for violation in result["violations"]:
            print(f"invalid: {violation}")
        return 2
    flag = " VIOLATION" if result["holder_violation"] else ""
    print(f"valid: worst gradient-growth ratio {result['holder_worst_ratio']:.6g} "
          f"(declared {result['holder_declared']:.6g}){flag}")
    return 2 if result["holder_violation"] else 0


_COMMANDS = {
    "run": _cmd_run,
    "replicate": _cmd_replicate,
    "rates": _cmd_rates,
    "table1": _cmd_table1,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ConfigValidationError as exc:
        for violation in exc.violations:
            print(f"invalid: {violation}", file=sys.stderr)
        return 2
    except SolverRuntimeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
