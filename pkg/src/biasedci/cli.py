"""Command-line interface: ``biasedci {cp,calibrate,ci,lengths,simulate}``.

Exit codes: 0 success, 2 usage or domain error, 3 model-assumption
violation (``s2 > s1``), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

import numpy as np

from . import io as bio
from .calibrate import calibrated_z, calibrated_z_w, length_ratio_table, optimal_w
from .coverage import HALF_PI, EstimatorModel, cp_t, cp_w, worst_case_cp
from .errors import AssumptionViolation, BootstrapFailure, DomainError, NumericalFailure
from .intervals import Kind, build
from .montecarlo import (STUDY_KINDS, SimulationConfig, SimulationResult, run_study,
                         simulate_joint_normal, study_columns)
from .normal import std_normal_quantile

SEED_ENV = "BIASEDCI_SEED"

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_ASSUMPTION = 3
EXIT_NUMERICAL = 4


class UsageError(DomainError):
    pass


def parse_grid(spec: str) -> list[float]:
    """``"start:stop:count"`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            count = int(count)
            if count < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(start), float(stop), count)]
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad grid spec {spec!r}; expected start:stop:count or a,b,c") from None


def _kinds(spec: str, shrink_rho: bool = False) -> list[Kind]:
    kinds = [Kind.parse(k) for k in spec.split(",") if k.strip()]
    if shrink_rho:
        kinds = [Kind.CI6S if k is Kind.CI6 else k for k in kinds]
    return kinds


@contextmanager
def _output(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(args, rows: list[dict], columns: Sequence[str], json_obj=None):
    with _output(args.out) as out:
        if args.format == "json":
            bio.write_json(rows if json_obj is None else json_obj, out)
        else:
            bio.write_csv(rows, columns, out)


def _summary(args, text: str):
    if getattr(args, "summary", False):
        print(text, file=sys.stderr)


def cmd_cp(args) -> int:
    if args.t_grid < 2:
        raise UsageError("--t-grid needs at least 2 points")
    z = args.z if args.z is not None else std_normal_quantile(0.5 * (1.0 + args.level))
    if not z > 0:
        raise UsageError("critical value must be positive")
    ts = np.linspace(0.0, HALF_PI, args.t_grid)
    if args.w == 1.0:
        cps = cp_t(ts, z)
    else:
        if args.rho is None:
            raise UsageError("--w below 1 needs --rho")
        cps = cp_w(ts, z, args.w, args.rho)
    worst = worst_case_cp(z, args.w, args.rho)
    rows = [{"row": "grid", "t": float(t), "cp": float(c)} for t, c in zip(ts, cps)]
    rows.append({"row": "worst_case", "t": worst.t_min, "cp": worst.cp_min})
    _emit(args, rows, ["row", "t", "cp"])
    _summary(args, f"z={z:.6g}  worst-case cp={worst.cp_min:.6g} at t={worst.t_min:.6g}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    if args.optimize_w:
        if args.rho is None:
            raise UsageError("--optimize-w needs --rho")
        w_star, cal = optimal_w(args.s1, args.s2, args.rho, args.level)
    elif args.w is not None and args.w != 1.0:
        if args.rho is None:
            raise UsageError("--w below 1 needs --rho")
        cal = calibrated_z_w(args.s1, args.s2, args.rho, args.level, args.w)
    else:
        cal = calibrated_z(args.s1, args.s2, args.level)
    record = cal.to_dict()
    record["bias_bound"] = cal.bias_bound_over_s1 * args.s1
    record["ratio_vs_w1"] = cal.z_tilde / calibrated_z(args.s1, args.s2, args.level).z_tilde
    columns = list(record)
    _emit(args, [record], columns, json_obj=record)
    _summary(args, f"z_tilde={cal.z_tilde:.6g}  w={cal.w:.6g}  ratio={cal.length_ratio:.6g}")
    return EXIT_OK


_NEEDS_THETA1 = {Kind.CI1, Kind.CI3, Kind.CI6, Kind.CI6S}
_NEEDS_THETA2 = {Kind.CI2, Kind.CI4, Kind.CI5, Kind.CI6, Kind.CI6S}
_NEEDS_S2 = {Kind.CI3, Kind.CI4, Kind.CI5, Kind.CI6, Kind.CI6S}


def cmd_ci(args) -> int:
    kinds = _kinds(args.kinds, args.shrink_rho)
    for kind in kinds:
        missing = [name for name, needs, val in (("--theta1", _NEEDS_THETA1, args.theta1),
                                                 ("--theta2", _NEEDS_THETA2, args.theta2),
                                                 ("--s2", _NEEDS_S2, args.s2))
                   if kind in needs and val is None]
        if missing:
            raise UsageError(f"{kind.value} needs {', '.join(missing)}")
    out = []
    for kind in kinds:
        iv = build(kind, args.theta1 if args.theta1 is not None else math.nan,
                   args.theta2 if args.theta2 is not None else math.nan,
                   args.s1, args.s2 if args.s2 is not None else math.nan,
                   args.rho, args.level, clip=args.clip)
        out.append(iv.to_dict())
    columns = ["kind", "level", "center", "lower", "upper", "half_width", "diagnostics"]
    csv_rows = [{**d, "diagnostics": ";".join(f"{k}={bio.format_value(v)}"
                                              for k, v in d["diagnostics"].items())} for d in out]
    with _output(args.out) as fh:
        if args.format == "json":
            bio.write_json(out, fh)
        else:
            bio.write_csv(csv_rows, columns, fh)
    return EXIT_OK


def cmd_lengths(args) -> int:
    s2_grid = parse_grid(args.s2_grid)
    rho_grid = parse_grid(args.rho_grid) if args.rho_grid else None
    rows = [r._asdict() for r in length_ratio_table(args.level, s2_grid, rho_grid)]
    _emit(args, rows, ["s2_over_s1", "rho", "ratio_ci5", "ratio_ci6"])
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    if args.mode == "joint-normal":
        model = EstimatorModel(b2=args.b2, s1=args.s1, s2=args.s2, rho=args.rho, theta=args.theta)
        cfg = SimulationConfig(model, args.level, args.reps, args.seed, tuple(_kinds(args.kinds)))
        res = simulate_joint_normal(cfg)
        rows = res.to_rows()
        _emit(args, rows, list(SimulationResult.RESULT_COLUMNS))
        for r in rows:
            _summary(args, f"{r['kind']}: coverage={r['coverage']:.6g} +/- {r['mc_stderr']:.2g}")
        return EXIT_OK
    ns = [int(v) for v in parse_grid(args.n)]
    kinds = _kinds(args.kinds) if args.kinds_given else None
    grid = [(n, args.level) for n in ns]
    extra = {} if kinds is None else {"kinds": kinds}
    rows = run_study(grid, args.reps, args.boot, args.seed, workers=args.workers, **extra)
    _emit(args, rows, study_columns(kinds or STUDY_KINDS))
    return EXIT_OK


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biasedci", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_format="csv"):
        sp.add_argument("--format", choices=("csv", "json"), default=default_format)
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        sp.add_argument("--summary", action="store_true",
                        help="print a short human-readable summary to stderr")

    sp = sub.add_parser("cp", help="coverage of theta2_hat +/- z s1 over the bias angle")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--level", type=float)
    g.add_argument("--z", type=float)
    sp.add_argument("--t-grid", type=int, default=201)
    sp.add_argument("--w", type=float, default=1.0)
    sp.add_argument("--rho", type=float)
    common(sp)
    sp.set_defaults(func=cmd_cp)

    sp = sub.add_parser("calibrate", help="solve for the calibrated critical value")
    sp.add_argument("--s1", type=float, required=True)
    sp.add_argument("--s2", type=float, required=True)
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--rho", type=float)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--optimize-w", action="store_true")
    g.add_argument("--w", type=float)
    common(sp, "json")
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("ci", help="build intervals from point estimates")
    sp.add_argument("--theta1", type=float)
    sp.add_argument("--theta2", type=float)
    sp.add_argument("--s1", type=float, required=True)
    sp.add_argument("--s2", type=float)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--kinds", default="CI1,CI2,CI5")
    sp.add_argument("--shrink-rho", action="store_true", help="use (1+rho)/2 for CI6")
    sp.add_argument("--clip", action="store_true", help="replace s2 > s1 by s1 instead of failing")
    common(sp, "json")
    sp.set_defaults(func=cmd_ci)

    sp = sub.add_parser("lengths", help="calibrated length relative to theta2_hat +/- z s1")
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--s2-grid", default="0.05:1:20")
    sp.add_argument("--rho-grid")
    common(sp)
    sp.set_defaults(func=cmd_lengths)

    sp = sub.add_parser("simulate", help="Monte Carlo coverage checks")
    sp.add_argument("--mode", choices=("joint-normal", "demo"), default="joint-normal")
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--b2", type=float, default=0.0)
    sp.add_argument("--s1", type=float, default=1.0)
    sp.add_argument("--s2", type=float, default=1.0)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--kinds")
    sp.add_argument("--n", default="100,200", help="demo sample sizes")
    sp.add_argument("--reps", type=int, default=None)
    sp.add_argument("--boot", type=int, default=399)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--level", type=float, default=0.95)
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            args.kinds_given = args.kinds is not None
            if args.kinds is None:
                args.kinds = "CI1,CI2,CI5"
            if args.reps is None:
                args.reps = 100_000 if args.mode == "joint-normal" else 500
            if args.seed is None:
                args.seed = _default_seed()
        return args.func(args)
    except AssumptionViolation as exc:
        print(f"biasedci: assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (NumericalFailure, BootstrapFailure) as exc:
        print(f"biasedci: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, ValueError) as exc:
        print(f"biasedci: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
