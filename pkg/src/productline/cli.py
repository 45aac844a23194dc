"""Command-line entry point: ``productline {solve,verify,oracle,sweep,plot}``.

Exit codes: 0 success, 2 invalid input, 3 verification failure, 4 oracle
gap too large, 5 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .commitment import (
    commitment_revenue,
    commitment_schedule,
    first_best_schedule,
    first_best_surplus,
)
from .errors import ProductLineError, ValidationError
from .limited import (
    Regime,
    classify,
    limited_schedule,
    monotonicity_check,
    solve_pooling_interval,
)
from .model import ModelParams, TieBreak
from .oracle import MIN_GRID, lp_tolerance, run_oracle
from .surplus import schedule_virtual_value
from .svg import plot_segments, render_svg, sidecar
from .verifier import verify_schedule

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_GAP, EXIT_IO = 0, 2, 3, 4, 5
TIES = {"low": TieBreak.FAVOR_LOW, "high": TieBreak.FAVOR_HIGH, "auto": None}

SWEEP_COLUMNS = ["mu", "c", "regime", "m_lo", "m_hi", "revenueLimited",
                 "revenueCommitment", "monotoneAnalytic", "monotoneNumeric",
                 "monotoneStated", "monotoneDerived", "statedVsDerivedDisagree"]


class UsageError(Exception):
    pass


def _params(args) -> ModelParams:
    return ModelParams.create(args.vl, args.vh, args.c)


def _schedule(params: ModelParams, regime: str):
    if regime == "firstbest":
        return first_best_schedule(params)
    if regime == "commitment":
        return commitment_schedule(params)
    return limited_schedule(params)


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def cmd_solve(args, out) -> int:
    params = _params(args)
    schedule = _schedule(params, args.regime)
    if args.tie and TIES[args.tie] not in (None, schedule.tie):
        print(f"warning: schedule prices use tie rule {schedule.tie.value}", file=sys.stderr)
    _emit(schedule.to_dict(), out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    params = _params(args)
    if args.grid < 1001:
        raise UsageError(f"--grid must be at least 1001, got {args.grid}")
    schedule = _schedule(params, args.regime)
    if args.regime == "firstbest":
        doc = verify_schedule(schedule, args.grid).to_dict()
        doc["socialSurplus"] = first_best_surplus(params)
        _emit(doc, out)
        return EXIT_OK
    check_seqrat = args.regime == "limited" or args.check_seqrat
    report = verify_schedule(schedule, args.grid, check_seqrat=check_seqrat)
    doc = report.to_dict()
    if args.regime == "limited":
        doc["monotonicity"] = monotonicity_check(params).to_dict()
    ok = report.passed(args.ic_tol, args.ir_tol, args.revenue_tol)
    doc["passed"] = ok
    _emit(doc, out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_oracle(args, out) -> int:
    if args.grid < MIN_GRID:
        print(f"warning: grid {args.grid} is below the minimum {MIN_GRID}", file=sys.stderr)
        return EXIT_INPUT
    params = _params(args)
    report = run_oracle(params, args.grid, TIES[args.tie], args.method)
    doc = report.to_dict()
    tol = args.tol if args.tol is not None else lp_tolerance(args.grid)
    doc["tolerance"] = tol
    _emit(doc, out)
    return EXIT_OK if abs(report.lp_minus_closed) <= tol else EXIT_GAP


def parse_range(text: str):
    """``a:b:steps`` -> ``steps`` evenly spaced values from ``a`` to ``b``."""
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise UsageError(f"malformed range {text!r}; expected a:b:steps") from exc
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"malformed range {text!r}")
    if n == 1:
        if a != b:
            raise UsageError(f"range {text!r} has one step but distinct ends")
        return np.array([a])
    return np.linspace(a, b, n)


def sweep_row(mu: float, c: float, v_H: float = 1.0) -> dict:
    """One sweep record; ``mu = 1`` is handled without building params."""
    if c <= 0:
        raise ValidationError(f"c must be positive, got {c}")
    if mu >= 1.0:
        # no discrimination motive: both regimes sell to everyone at v_H
        rev = 1.0 / (12.0 * c) + v_H
        return {"mu": mu, "c": c, "regime": "MuEqualsOne", "m_lo": "", "m_hi": "",
                "revenueLimited": rev, "revenueCommitment": rev,
                "monotoneAnalytic": True, "monotoneNumeric": True,
                "monotoneStated": True, "monotoneDerived": True,
                "statedVsDerivedDisagree": False}
    params = ModelParams.create(mu * v_H, v_H, c)
    regime = classify(params)
    m_lo = m_hi = ""
    if regime in (Regime.MU_HALF_TO_L, Regime.MU_ABOVE_L):
        pool = solve_pooling_interval(params)
        m_lo, m_hi = pool.m_lo, pool.m_hi
    mono = monotonicity_check(params)
    return {
        "mu": mu, "c": c, "regime": regime.value, "m_lo": m_lo, "m_hi": m_hi,
        "revenueLimited": schedule_virtual_value(limited_schedule(params, check_transfers=False)),
        "revenueCommitment": commitment_revenue(params),
        "monotoneAnalytic": mono.analytic_ok, "monotoneNumeric": mono.numeric_ok,
        "monotoneStated": mono.stated_condition_ok,
        "monotoneDerived": mono.derived_condition_ok,
        "statedVsDerivedDisagree": mono.stated_vs_derived_disagree,
    }


def sweep_threads(requested: int | None = None) -> int:
    cap = os.environ.get("MECH_SOLVER_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"MECH_SOLVER_THREADS={cap!r} is not an integer")
    return max(1, n)


def run_sweep(mus, cs, v_H: float = 1.0, threads: int | None = None) -> list:
    """Rows in row-major order (``mu`` outer, ``c`` inner) whatever the threading."""
    points = [(float(m), float(c)) for m in mus for c in cs]
    with ThreadPoolExecutor(max_workers=sweep_threads(threads)) as pool:
        return list(pool.map(lambda mc: sweep_row(mc[0], mc[1], v_H), points))


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([_cell(r[k]) for k in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args, out) -> int:
    mus = parse_range(args.mu_range)
    cs = parse_range(args.c_range)
    if np.any(mus <= 0) or np.any(mus > 1):
        raise UsageError("mu values must lie in (0, 1]")
    if np.any(cs <= 0):
        raise UsageError("c values must be positive")
    text = rows_to_csv(run_sweep(mus, cs, args.vh, args.threads))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def cmd_plot(args, out) -> int:
    params = _params(args)
    which = ["firstbest", "commitment", "limited"] if args.curves == "all" else [args.curves]
    curves = {name: plot_segments(_schedule(params, name)) for name in which}
    title = f"v_L={args.vl:g}, v_H={args.vh:g}, c={args.c:g}"
    svg_path = Path(args.out)
    side_path = Path(args.sidecar) if args.sidecar else svg_path.with_suffix(".json")
    svg_path.write_text(render_svg(curves, title), encoding="utf-8")
    side_path.write_text(sidecar(curves, params), encoding="utf-8")
    out.write(f"{svg_path}\n{side_path}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="productline", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def model_flags(p, regime=True):
        p.add_argument("--vl", type=float, required=True, help="low period-2 valuation")
        p.add_argument("--vh", type=float, required=True, help="high period-2 valuation")
        p.add_argument("--c", type=float, required=True, help="quality cost curvature")
        if regime:
            p.add_argument("--regime", choices=["firstbest", "commitment", "limited"],
                           default="limited")

    p = sub.add_parser("solve", help="print a schedule as JSON")
    model_flags(p)
    p.add_argument("--tie", choices=["low", "high"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="brute-force IC/IR/BP/pricing/revenue checks")
    model_flags(p)
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--check-seqrat", action="store_true",
                   help="also require sequentially rational prices (always on for limited)")
    p.add_argument("--ic-tol", type=float, default=1e-4)
    p.add_argument("--ir-tol", type=float, default=1e-9)
    p.add_argument("--revenue-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="compare closed forms to LP and search oracles")
    model_flags(p, regime=False)
    p.add_argument("--grid", type=int, default=2001)
    p.add_argument("--tie", choices=sorted(TIES), default="auto")
    p.add_argument("--method", default="highs-ds")
    p.add_argument("--tol", type=float, default=None,
                   help="allowed |LP - closed form| (default depends on grid)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="CSV over a (mu, c) grid")
    p.add_argument("--mu-range", required=True, help="a:b:steps")
    p.add_argument("--c-range", required=True, help="a:b:steps")
    p.add_argument("--vh", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG of quality schedules plus a JSON sidecar")
    model_flags(p, regime=False)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar", default=None)
    p.add_argument("--curves", choices=["all", "firstbest", "commitment", "limited"],
                   default="all")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (ValidationError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ProductLineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
