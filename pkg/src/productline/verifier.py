"""Brute-force verification of a schedule.

Every check here works from the schedule alone (qualities, transfers and
period-2 prices per cell) and does not reuse any closed-form reasoning from
the solvers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .model import (
    MeanDistribution,
    ModelParams,
    Schedule,
    ScheduleRegime,
    SegmentKind,
    TieBreak,
    VerificationReport,
    check_type,
)
from .oracle import check_convex_order
from .pricing import TIE_BAND, period2_price
from .surplus import induced_distribution, schedule_virtual_value

__all__ = [
    "consumer_utility", "ic_check", "ir_check", "sequential_rationality_check",
    "bayes_plausibility_check", "revenue_consistency", "transfer_revenue",
    "induced_distribution", "verify_schedule", "SeqRatResult",
]


def _slope_and_transfer(report, schedule: Schedule):
    """Per-report coefficients: utility is ``theta * A(report) - x1(report)``."""
    p = schedule.params
    A = schedule.quality(report) + p.delta_v * schedule.serves_low(report)
    return A, schedule.transfer(report)


def consumer_utility(theta, report, schedule: Schedule):
    """Payoff of type `theta` who reports `report`.

    ``theta q1(report) - x1(report) + theta delta_v 1{price2(report) = v_L}``;
    the period-2 rent accrues because a high-valuation consumer facing
    ``v_L`` keeps ``v_H - v_L`` with probability ``theta``.
    """
    check_type(theta)
    check_type(report, "report")
    A, x = _slope_and_transfer(report, schedule)
    out = np.asarray(theta, dtype=float) * A - x
    return float(out) if np.ndim(out) == 0 else out


def ic_check(schedule: Schedule, report_grid: int = 2001, type_grid: int = 2001,
             chunk: int = 512) -> float:
    """Largest gain from misreporting over a types-by-reports grid.

    Returns
    -------
    float
        ``max_theta [max_r U(theta, r) - U(theta, theta)]``, never negative.
    """
    reports = np.linspace(0.0, 1.0, report_grid)
    types = np.linspace(0.0, 1.0, type_grid)
    A, x = _slope_and_transfer(reports, schedule)
    truth = consumer_utility(types, types, schedule)
    best = np.empty_like(types)
    for s in range(0, types.size, chunk):
        t = types[s:s + chunk]
        best[s:s + chunk] = np.max(t[:, None] * A[None, :] - x[None, :], axis=1)
    return float(max(0.0, np.max(best - truth)))


def ir_check(schedule: Schedule, type_grid: int = 2001) -> float:
    """Minimum truthful utility over the type grid (``>= 0`` means IR holds)."""
    types = np.linspace(0.0, 1.0, type_grid)
    return float(np.min(consumer_utility(types, types, schedule)))


@dataclass
class SeqRatResult:
    ok: bool
    offending: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def sequential_rationality_check(schedule: Schedule, params: ModelParams | None = None,
                                 tie: TieBreak | None = None,
                                 tol: float = 1e-12) -> SeqRatResult:
    """Is each cell's period-2 price a best response to its posterior mean?

    Pooled and excluded cells are checked at the uniform conditional mean
    ``(lo + hi)/2``.  A separating segment is a continuum of singleton cells;
    it fails if a positive-length part of it sits on the wrong side of
    ``mu_bar``.

    Returns
    -------
    SeqRatResult
        ``offending`` lists ``{segment, lo, hi, price2, expected}`` per bad
        cell or sub-interval.
    """
    p = schedule.params if params is None else params
    tie = schedule.tie if tie is None else tie
    mu = p.mu_bar
    bad = []
    for k, s in enumerate(schedule.segments):
        if s.hi <= s.lo:
            continue
        if s.kind is SegmentKind.SEPARATING:
            if s.price2 == p.v_L:
                a, b = max(s.lo, mu), s.hi
                expected = p.v_H
            else:
                a, b = s.lo, min(s.hi, mu)
                expected = p.v_L
            if b - a > tol:
                bad.append({"segment": k, "lo": a, "hi": b, "price2": s.price2,
                            "expected": expected})
        else:
            mean = 0.5 * (s.lo + s.hi)
            expected = period2_price(mean, p, tie)
            if expected != s.price2 or abs(mean - s.cell_mean) > TIE_BAND:
                bad.append({"segment": k, "lo": s.lo, "hi": s.hi, "price2": s.price2,
                            "expected": expected})
    return SeqRatResult(not bad, bad)


def bayes_plausibility_check(G: MeanDistribution, n_test: int = 1001,
                             tol: float = 1e-9):
    """Mean ``1/2`` and convex-order dominance by the prior.

    Returns
    -------
    ok : bool
    worst : float
    """
    return check_convex_order(G, n_test, tol)


def transfer_revenue(schedule: Schedule) -> float:
    """Firm revenue by quadrature of ``x1 - c q1**2 / 2`` plus period-2 sales.

    Period 2 earns ``v_L`` per consumer at the low price and ``theta v_H``
    (a sale only to the high valuation) at the high price.
    """
    p = schedule.params
    total = 0.0
    for s in schedule.segments:
        if s.hi <= s.lo:
            continue
        low = s.price2 == p.v_L

        def flow(t, s=s, low=low):
            q = float(s.quality(t))
            p2 = p.v_L if low else t * p.v_H
            return float(s.transfer(t)) - 0.5 * p.c * q * q + p2

        val, _ = quad(flow, s.lo, s.hi, epsabs=1e-13, epsrel=1e-12)
        total += val
    return total


def revenue_consistency(schedule: Schedule, params: ModelParams | None = None) -> float:
    """Gap between transfer-based revenue and the virtual-surplus value.

    The virtual-surplus value uses the schedule's own prices; for a
    sequentially rational schedule whose cells get ``quality_given_mean`` it
    coincides with ``int R dG`` for the induced mean distribution ``G``.
    """
    return abs(transfer_revenue(schedule) - schedule_virtual_value(schedule))


def numeric_monotonicity(schedule: Schedule, n: int = 10_001, tol: float = 1e-9):
    """Grid test that ``U'`` is nondecreasing; returns ``(ok, worst_drop, where)``."""
    grid = np.linspace(0.0, 1.0, n)
    p = schedule.params
    up = schedule.quality(grid) + p.delta_v * schedule.serves_low(grid)
    steps = np.diff(up)
    k = int(np.argmin(steps))
    worst = max(0.0, -float(steps[k]))
    return worst <= tol, worst, (float(grid[k + 1]) if worst > 0 else None)


def verify_schedule(schedule: Schedule, grid: int = 2001,
                    check_seqrat: bool = True) -> VerificationReport:
    """Run every check and collect the worst violations."""
    report = VerificationReport(grid_sizes={"type": grid, "report": grid})
    if schedule.regime is ScheduleRegime.FIRST_BEST:
        report.notes.append("incentive checks not applicable to the efficient benchmark")
        return report
    report.ic_violation = ic_check(schedule, grid, grid)
    report.min_utility = ir_check(schedule, grid)
    report.ir_violation = max(0.0, -report.min_utility)
    G = induced_distribution(schedule)
    report.bp_ok, report.bp_violation = bayes_plausibility_check(G)
    report.bp_violation = max(0.0, report.bp_violation)
    mono_ok, drop, where = numeric_monotonicity(schedule)
    report.monotonicity_ok, report.worst_drop, report.worst_drop_at = mono_ok, drop, where
    if check_seqrat:
        sr = sequential_rationality_check(schedule)
        report.seq_rationality_ok = sr.ok
        report.offending_cells = sr.offending
    report.revenue_gap = revenue_consistency(schedule)
    return report
