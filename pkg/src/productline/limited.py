"""Closed-form product lines when the firm cannot commit to period-2 prices.

The solution depends on where the indifference belief ``mu_bar`` falls:

=================  =====================================================
``MuLeQuarter``    ``mu_bar <= 1/4``: the commitment outcome survives.
``MuQuarterToHalf`` ``1/4 < mu_bar < 1/2``: exclusion widens to ``[0, 2 mu_bar)``.
``MuHalfToL``      ``1/2 <= mu_bar < l``: exclusion, then a pooled cell
                   ``[m_lo, m_hi]`` with mean ``mu_bar``, then separation.
``MuAboveL``       ``l <= mu_bar < 1``: exclusion up to ``1/2``, separation,
                   a pooled cell, separation.
=================  =====================================================

with ``l = l_threshold(c * v_H)``.  Money enters the pooling equations only
through ``c * v_H`` once the period-1 term is written in model units.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .envelope import closed_form_on_envelope_grid, envelope_transfers
from .errors import ConsistencyError, NoRootError, RegimeError
from .model import (
    ModelParams,
    QualityRule,
    Schedule,
    ScheduleRegime,
    Segment,
    SegmentKind,
    TieBreak,
    TransferRule,
    check_type,
    validate,
)

ROOT_TOL = 1e-12


class Regime(enum.Enum):
    MU_LE_QUARTER = "MuLeQuarter"
    MU_QUARTER_TO_HALF = "MuQuarterToHalf"
    MU_HALF_TO_L = "MuHalfToL"
    MU_ABOVE_L = "MuAboveL"


@dataclass(frozen=True)
class PoolingInterval:
    m_lo: float
    m_hi: float

    @property
    def mean(self) -> float:
        return 0.5 * (self.m_lo + self.m_hi)


def l_threshold(c: float) -> float:
    """``(2 + 3c) / (4 (1 + c))``; increases from ``1/2`` to ``3/4``."""
    return (2.0 + 3.0 * c) / (4.0 * (1.0 + c))


def effective_cost(params: ModelParams) -> float:
    """Cost curvature measured in units where ``v_H = 1``."""
    return params.c * params.v_H


def classify(params: ModelParams) -> Regime:
    mu = params.mu_bar
    if mu <= 0.25:
        return Regime.MU_LE_QUARTER
    if mu < 0.5:
        return Regime.MU_QUARTER_TO_HALF
    if mu < l_threshold(effective_cost(params)):
        return Regime.MU_HALF_TO_L
    return Regime.MU_ABOVE_L


def regime_tie(regime: Regime) -> TieBreak:
    """Firm-preferred tie rule: ``v_H`` at the tie below ``1/2``, ``v_L`` above."""
    if regime in (Regime.MU_LE_QUARTER, Regime.MU_QUARTER_TO_HALF):
        return TieBreak.FAVOR_HIGH
    return TieBreak.FAVOR_LOW


def solve_m_star_low(params: ModelParams) -> float:
    """Exclusion threshold with conditional mean ``mu_bar``: ``m* = 2 mu_bar``."""
    if classify(params) is not Regime.MU_QUARTER_TO_HALF:
        raise RegimeError(f"mu_bar={params.mu_bar} is outside (1/4, 1/2)")
    m = 2.0 * params.mu_bar
    assert 0.5 <= m < 1.0
    return m


# --------------------------------------------------------------------------
# Pooling-interval quadratics


def h_low_coefficients(params: ModelParams):
    """Coefficients ``(a, b, k)`` of the quadratic in the top end ``m_hi``.

    Used when the bottom of the pooled cell sits at or below ``1/2``.  With
    ``s = 2 mu_bar - 1`` and money measured by ``v_H``:

        (2/c) x**2 + (v_H s - 2/c) x + [1/(2c) - s**2/c - v_H s] = 0.
    """
    c, vh = params.c, params.v_H
    s = 2.0 * params.mu_bar - 1.0
    return 2.0 / c, vh * s - 2.0 / c, 0.5 / c - s * s / c - vh * s


def h_high_coefficients(params: ModelParams):
    """Coefficients ``(a, b, k)`` of the quadratic in the bottom end ``m_lo``.

    Used when the pooled cell starts above ``1/2``:

        (4/c) (x - mu_bar)**2 - v_H s (x - s) = 0,   s = 2 mu_bar - 1.
    """
    c, vh, mu = params.c, params.v_H, params.mu_bar
    s = 2.0 * mu - 1.0
    return 4.0 / c, -8.0 * mu / c - vh * s, 4.0 * mu * mu / c + vh * s * s


def quadratic_roots(a: float, b: float, k: float):
    """Real roots of ``a x**2 + b x + k`` in ascending order.

    Uses the cancellation-free form ``q = -(b + sign(b) sqrt(disc)) / 2``.
    Returns an empty tuple when the discriminant is negative.
    """
    disc = b * b - 4.0 * a * k
    if disc < 0.0:
        if disc > -1e-14 * max(b * b, abs(4.0 * a * k)):
            disc = 0.0
        else:
            return ()
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0.0:
        return (0.0, 0.0)
    r1, r2 = q / a, k / q
    return (min(r1, r2), max(r1, r2))


def _root_in(coef, lo: float, hi: float, closed_lo: bool, closed_hi: bool,
             tol: float = ROOT_TOL) -> float:
    roots = quadratic_roots(*coef)
    inside = []
    for r in roots:
        ok_lo = r >= lo - tol if closed_lo else r > lo - tol
        ok_hi = r <= hi + tol if closed_hi else r < hi + tol
        if ok_lo and ok_hi:
            inside.append(min(max(r, lo), hi))
    if len(roots) == 2 and roots[0] == roots[1]:
        inside = inside[:1]
    if len(inside) != 1:
        raise NoRootError(f"expected one root in [{lo}, {hi}], found {inside} "
                          f"among {roots}")
    return inside[0]


def solve_pooling_interval(params: ModelParams, regime: Regime | None = None
                           ) -> PoolingInterval:
    """Pooled cell ``[m_lo, m_hi]`` whose mean is ``mu_bar``.

    Parameters
    ----------
    params : ModelParams
    regime : Regime, optional
        Force the ``MuHalfToL`` or ``MuAboveL`` equation (used for boundary
        diagnostics); by default the classified regime.

    Raises
    ------
    RegimeError
        If ``mu_bar < 1/2``.
    NoRootError
        If the relevant quadratic has no root in its bracket.
    """
    mu = params.mu_bar
    if mu < 0.5:
        raise RegimeError(f"mu_bar={mu} < 1/2 has no pooled cell")
    if mu == 0.5:
        return PoolingInterval(0.5, 0.5)
    regime = classify(params) if regime is None else regime
    if regime is Regime.MU_HALF_TO_L:
        m_hi = _root_in(h_low_coefficients(params), mu, 1.0, False, True)
        m_lo = 2.0 * mu - m_hi
        if m_lo > 0.5 + ROOT_TOL:
            raise NoRootError(f"pooled cell starts at {m_lo} > 1/2")
    elif regime is Regime.MU_ABOVE_L:
        m_lo = _root_in(h_high_coefficients(params), 0.5, mu, True, False)
        m_hi = 2.0 * mu - m_lo
        if m_hi > 1.0 + ROOT_TOL:
            raise NoRootError(f"pooled cell ends at {m_hi} > 1")
    else:
        raise RegimeError(f"{regime.value} has no pooled cell")
    return PoolingInterval(m_lo, m_hi)


# --------------------------------------------------------------------------
# Schedules


def _sep(lo, hi, c, transfer_const, price):
    return Segment(lo, hi, SegmentKind.SEPARATING, QualityRule.separating(c),
                   TransferRule(transfer_const, 0.0, 1.0 / c), price)


def _flat(lo, hi, kind, q, x, price):
    return Segment(lo, hi, kind, QualityRule.const(q), TransferRule.const(x),
                   price, cell_mean=0.5 * (lo + hi))


def limited_schedule(params: ModelParams, regime: Regime | None = None,
                     check_transfers: bool = True) -> Schedule:
    """Optimal product line, transfers and prices without price commitment.

    Parameters
    ----------
    params : ModelParams
    regime : Regime, optional
        Override the classification (boundary diagnostics only).
    check_transfers : bool
        Cross-check the closed-form transfers against the envelope
        integral (see :func:`limited_transfers`).

    Returns
    -------
    Schedule
        ``case`` holds the regime name.  Zero-width cells are dropped.
    """
    validate(params)
    regime = classify(params) if regime is None else regime
    c, vl, vh, dv, mu = params.c, params.v_L, params.v_H, params.delta_v, params.mu_bar
    if regime is Regime.MU_LE_QUARTER:
        segs = [_flat(0.0, 0.5, SegmentKind.EXCLUSION, 0.0, 0.0, vh),
                _sep(0.5, 1.0, c, -0.25 / c, vh)]
    elif regime is Regime.MU_QUARTER_TO_HALF:
        m = 2.0 * mu
        segs = [_flat(0.0, m, SegmentKind.EXCLUSION, 0.0, 0.0, vh),
                _sep(m, 1.0, c, -m * (1.0 - m) / c, vh)]
    else:
        pool = solve_pooling_interval(params, regime)
        lo, hi = pool.m_lo, pool.m_hi
        qbar = (2.0 * mu - 1.0) / c
        if regime is Regime.MU_HALF_TO_L:
            x_pool = lo * qbar
            segs = [_flat(0.0, lo, SegmentKind.EXCLUSION, 0.0, 0.0, vl)]
        else:
            x_pool = lo * qbar - (lo - 0.5) ** 2 / c
            segs = [_flat(0.0, 0.5, SegmentKind.EXCLUSION, 0.0, 0.0, vl),
                    _sep(0.5, lo, c, -0.25 / c, vl)]
        top_const = hi * (hi - 2.0 * mu) / c - dv * hi + x_pool
        segs += [_flat(lo, hi, SegmentKind.POOLING, qbar, x_pool, vl),
                 _sep(hi, 1.0, c, top_const, vh)]
    segs = [s for s in segs if s.hi > s.lo]
    schedule = Schedule(params, ScheduleRegime.LIMITED_COMMITMENT, tuple(segs),
                        tie=regime_tie(regime), case=regime.value)
    if check_transfers:
        limited_transfers(schedule)
    return schedule


def limited_transfers(schedule: Schedule, tol: float = 1e-6, n: int = 10_001) -> Schedule:
    """Confirm the closed-form transfers against envelope integration.

    The closed forms are attached by :func:`limited_schedule`; this routine
    recomputes them from ``U' = q1 + delta_v 1{v_L}`` with ``U(0) = 0``.

    Raises
    ------
    ConsistencyError
        If the two routes differ by more than `tol` anywhere on the grid.
    """
    _, _, x_env = envelope_transfers(schedule, n)
    x_closed = closed_form_on_envelope_grid(schedule, n)
    gap = float(np.max(np.abs(x_env - x_closed)))
    if gap > tol:
        raise ConsistencyError(f"closed-form and envelope transfers differ by {gap:.3e}")
    return schedule


def u_prime(theta, schedule: Schedule):
    """Marginal utility ``q1(theta) + delta_v * 1{price2 = v_L}``."""
    check_type(theta)
    out = schedule.quality(theta) + schedule.params.delta_v * schedule.serves_low(theta)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# Monotonicity


def stated_monotone_condition(params: ModelParams) -> bool:
    """The headline sufficient condition ``mu_bar >= (1 + c)/(2 + c)``."""
    ce = effective_cost(params)
    return params.mu_bar >= (1.0 + ce) / (2.0 + ce)


def derived_monotone_condition(params: ModelParams) -> bool:
    """``(1 - mu_bar)(1 + c/2 - 2 mu_bar) <= 0``, i.e. ``mu_bar >= (2 + c)/4``."""
    ce = effective_cost(params)
    return params.mu_bar >= (2.0 + ce) / 4.0


def analytic_monotone(params: ModelParams) -> bool:
    """Closed-form verdict on whether ``U'`` is nondecreasing.

    Below ``1/2`` it always is.  In ``MuHalfToL`` it never is.  In
    ``MuAboveL`` the only possible drop is at the top of the pooled cell,
    where ``U'`` moves from ``qbar + delta_v`` to ``(2 m_hi - 1)/c``; this
    needs ``m_hi >= mu_bar + c delta_v / 2``.
    """
    regime = classify(params)
    if regime in (Regime.MU_LE_QUARTER, Regime.MU_QUARTER_TO_HALF):
        return True
    if regime is Regime.MU_HALF_TO_L:
        return False
    pool = solve_pooling_interval(params)
    return pool.m_hi >= params.mu_bar + 0.5 * params.c * params.delta_v - 1e-12


@dataclass
class MonotonicityReport:
    regime: Regime
    analytic_ok: bool
    numeric_ok: bool
    worst_drop: float
    worst_drop_at: float | None
    stated_condition_ok: bool
    derived_condition_ok: bool

    @property
    def stated_vs_derived_disagree(self) -> bool:
        """The two published sufficient conditions give different answers."""
        if self.regime in (Regime.MU_LE_QUARTER, Regime.MU_QUARTER_TO_HALF):
            return False
        return self.stated_condition_ok != self.derived_condition_ok

    @property
    def analytic_vs_numeric_disagree(self) -> bool:
        return self.analytic_ok != self.numeric_ok

    @property
    def relaxed_only(self) -> bool:
        return not self.numeric_ok

    def to_dict(self) -> dict:
        return {
            "analyticOk": self.analytic_ok,
            "numericOk": self.numeric_ok,
            "worstDrop": self.worst_drop,
            "worstDropAt": self.worst_drop_at,
            "regime": self.regime.value,
            "statedConditionOk": self.stated_condition_ok,
            "derivedConditionOk": self.derived_condition_ok,
            "statedVsDerivedDisagree": self.stated_vs_derived_disagree,
            "analyticVsNumericDisagree": self.analytic_vs_numeric_disagree,
            "label": ("relaxed-only, not implementable as stated"
                      if self.relaxed_only else "implementable"),
        }


def monotonicity_check(params: ModelParams, n: int = 10_001,
                       tol: float = 1e-9) -> MonotonicityReport:
    """Compare closed-form and grid verdicts on monotonicity of ``U'``."""
    validate(params)
    schedule = limited_schedule(params, check_transfers=False)
    grid = np.linspace(0.0, 1.0, n)
    up = u_prime(grid, schedule)
    steps = np.diff(up)
    k = int(np.argmin(steps))
    worst = max(0.0, -float(steps[k]))
    return MonotonicityReport(
        regime=classify(params),
        analytic_ok=analytic_monotone(params),
        numeric_ok=worst <= tol,
        worst_drop=worst,
        worst_drop_at=float(grid[k + 1]) if worst > 0 else None,
        stated_condition_ok=stated_monotone_condition(params),
        derived_condition_ok=derived_monotone_condition(params),
    )


# --------------------------------------------------------------------------
# Boundary diagnostics


def boundary_diagnostics(params: ModelParams, tol: float = 1e-9) -> dict:
    """Revenues of both adjacent regime schedules near a regime boundary.

    Returns an empty dict when ``mu_bar`` is not within `tol` of ``1/4``,
    ``1/2`` or ``l``.  Otherwise maps each regime name whose schedule could
    be built to its revenue.
    """
    from .surplus import schedule_virtual_value

    mu = params.mu_bar
    ell = l_threshold(effective_cost(params))
    pairs = [(0.25, (Regime.MU_LE_QUARTER, Regime.MU_QUARTER_TO_HALF)),
             (0.5, (Regime.MU_QUARTER_TO_HALF, Regime.MU_HALF_TO_L)),
             (ell, (Regime.MU_HALF_TO_L, Regime.MU_ABOVE_L))]
    out = {}
    for edge, regimes in pairs:
        if abs(mu - edge) > tol:
            continue
        for r in regimes:
            try:
                if r is Regime.MU_QUARTER_TO_HALF:
                    m = 2.0 * mu
                    segs = [_flat(0.0, m, SegmentKind.EXCLUSION, 0.0, 0.0, params.v_H),
                            _sep(m, 1.0, params.c, -m * (1.0 - m) / params.c, params.v_H)]
                    sched = Schedule(params, ScheduleRegime.LIMITED_COMMITMENT,
                                     [s for s in segs if s.hi > s.lo], case=r.value)
                else:
                    sched = limited_schedule(params, regime=r, check_transfers=False)
                out[r.value] = schedule_virtual_value(sched)
            except (NoRootError, RegimeError):
                continue
    return out


__all__ = [
    "Regime", "PoolingInterval", "l_threshold", "classify", "solve_m_star_low",
    "solve_pooling_interval", "limited_schedule", "limited_transfers", "u_prime",
    "monotonicity_check", "MonotonicityReport", "boundary_diagnostics",
    "quadratic_roots", "h_low_coefficients", "h_high_coefficients",
    "stated_monotone_condition", "derived_monotone_condition", "analytic_monotone",
    "effective_cost", "regime_tie",
]
