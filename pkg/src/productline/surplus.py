"""Payoff of the firm as a function of the posterior mean.

After transfers are substituted out, the firm's payoff from a cell whose
posterior mean is ``m`` splits into a period-1 part (virtual surplus from
quality) and a period-2 part (revenue net of the information rent the low
price hands to period-1 types):

    Q(m) = max(2m - 1, 0)**2 / (2c)
    P(m) = 2 m delta_v + 2 v_L - v_H    if the period-2 price is v_L
         = m v_H                        if the period-2 price is v_H

and ``R(m) = Q(m) + P(m)``.  ``Q`` does not depend on ``v_H``; both price
branches of ``P`` are linear in money units, so
``R(m; s v_L, s v_H, c / s) = s R(m; v_L, v_H, c)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .model import (
    MeanDistribution,
    ModelParams,
    Schedule,
    SegmentKind,
    TieBreak,
    check_type,
)
from .pricing import serves_low


class RBranch(enum.Enum):
    MU_BELOW_HALF = "MuBelowHalf"
    MU_ABOVE_HALF = "MuAboveHalf"


def quality_given_mean(mean, params: ModelParams):
    """Optimal period-1 quality for a cell with posterior mean `mean`.

    ``max(0, (2 mean - 1) / c)``.
    """
    check_type(mean, "mean")
    q = np.maximum(0.0, (2.0 * np.asarray(mean, dtype=float) - 1.0) / params.c)
    return float(q) if q.ndim == 0 else q


def period1_term(mean, params: ModelParams):
    """``Q(m)``: virtual surplus of the optimal quality at mean `m`."""
    m = np.asarray(mean, dtype=float)
    return np.maximum(2.0 * m - 1.0, 0.0) ** 2 / (2.0 * params.c)


def period2_term(mean, params: ModelParams, low):
    """``P(m)`` on the branch selected by the boolean `low`."""
    m = np.asarray(mean, dtype=float)
    return np.where(low, 2.0 * m * params.delta_v + 2.0 * params.v_L - params.v_H,
                    m * params.v_H)


@dataclass(frozen=True)
class RFunction:
    """``R`` bound to a parameter triple.

    The `branch` label records which side of ``1/2`` the indifference
    belief falls on; it is derived from `params` when omitted.
    """

    params: ModelParams
    branch: RBranch | None = None

    def __post_init__(self):
        expected = (RBranch.MU_ABOVE_HALF if self.params.mu_bar >= 0.5
                    else RBranch.MU_BELOW_HALF)
        if self.branch is None:
            object.__setattr__(self, "branch", expected)
        elif self.branch is not expected:
            raise ValueError(f"branch {self.branch.value} inconsistent with "
                             f"mu_bar={self.params.mu_bar}")

    def __call__(self, mean, tie: TieBreak = TieBreak.FAVOR_LOW):
        return R(mean, self, tie)

    def best(self, mean):
        """Firm-preferred value at each mean: ties go to the larger branch."""
        m = np.asarray(mean, dtype=float)
        lo = R(m, self, TieBreak.FAVOR_LOW)
        hi = R(m, self, TieBreak.FAVOR_HIGH)
        return np.maximum(lo, hi)


def R(mean, rf: RFunction, tie: TieBreak):
    """Firm payoff at posterior mean `mean` with the period-2 tie rule `tie`.

    Examples
    --------
    >>> rf = RFunction(ModelParams.create(0.75, 1.0, 2.0))
    >>> float(R(0.0, rf, TieBreak.FAVOR_LOW))
    0.5
    """
    low = serves_low(mean, rf.params, tie)
    out = period1_term(mean, rf.params) + period2_term(mean, rf.params, low)
    return float(out) if np.ndim(out) == 0 else out


def integrate_R(a: float, b: float, params: ModelParams, low: bool) -> float:
    """Exact ``int_a^b R(m) dm`` on one price branch."""
    if b <= a:
        return 0.0
    dv, vl, vh, c = params.delta_v, params.v_L, params.v_H, params.c
    if low:
        p2 = dv * (b * b - a * a) + (2.0 * vl - vh) * (b - a)
    else:
        p2 = 0.5 * vh * (b * b - a * a)
    lo, hi = max(a, 0.5), max(b, 0.5)
    p1 = ((2.0 * hi - 1.0) ** 3 - (2.0 * lo - 1.0) ** 3) / (12.0 * c)
    return p1 + p2


def integrate_R_prior(a: float, b: float, params: ModelParams, tie: TieBreak) -> float:
    """``int_a^b R(m) dm`` with the sequentially rational price at each ``m``."""
    mu = params.mu_bar
    total = 0.0
    if a < mu:
        total += integrate_R(a, min(b, mu), params, True)
    if b > mu:
        total += integrate_R(max(a, mu), b, params, False)
    return total


def revenue_of_distribution(G: MeanDistribution, rf: RFunction, tie: TieBreak) -> float:
    """``sum_i g_i R(m_i)``."""
    return float(G.weights @ np.asarray(R(G.support, rf, tie), dtype=float))


# --------------------------------------------------------------------------
# Virtual surplus of an arbitrary schedule


def virtual_surplus(theta, q1, low, params: ModelParams):
    """Pointwise dynamic virtual surplus for a separating type.

    ``q (2 theta - 1) - c q**2 / 2`` plus the period-2 term
    ``theta v_H q2(v_H) + (1 - theta)(2 v_L - v_H) q2(v_L)``.
    """
    theta = np.asarray(theta, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    return (q1 * (2.0 * theta - 1.0) - 0.5 * params.c * q1 ** 2
            + period2_term(theta, params, low))


def segment_virtual_value(seg, params: ModelParams) -> float:
    """Exact integral of the virtual surplus over one segment."""
    low = seg.price2 == params.v_L
    if seg.kind is SegmentKind.SEPARATING:
        th = Polynomial([0.0, 1.0])
        q = Polynomial([seg.quality.intercept, seg.quality.slope])
        if low:
            p2 = 2.0 * params.delta_v * th + (2.0 * params.v_L - params.v_H)
        else:
            p2 = params.v_H * th
        integrand = q * (2.0 * th - 1.0) - 0.5 * params.c * q * q + p2
        anti = integrand.integ()
        return float(anti(seg.hi) - anti(seg.lo))
    mass = seg.hi - seg.lo
    m = seg.cell_mean
    q = seg.quality.intercept
    return mass * float(virtual_surplus(m, q, low, params))


def schedule_virtual_value(schedule: Schedule) -> float:
    """Firm revenue implied by the schedule's allocation and period-2 prices.

    Exact (polynomial antiderivatives), using whatever prices the schedule
    posts.  For a sequentially rational schedule with quality
    ``quality_given_mean`` on every cell this equals ``int R dG`` of the
    induced mean distribution.
    """
    return sum(segment_virtual_value(s, schedule.params) for s in schedule.segments)


def induced_distribution(schedule: Schedule, cells_per_unit: int = 10_000,
                         tol: float = 1e-9) -> MeanDistribution:
    """Finite mean distribution generated by `schedule`.

    Pooled and excluded cells become atoms at their midpoints.  Separating
    segments (split at ``mu_bar`` if they straddle it) are cut into cells of
    width about ``1 / cells_per_unit`` whose midpoints carry the cell mass;
    this is itself a coarsening of the prior, so it stays Bayes plausible.
    """
    mu = schedule.params.mu_bar
    ms, gs = [], []
    for s in schedule.segments:
        width = s.hi - s.lo
        if width <= 0.0:
            continue
        if s.kind is not SegmentKind.SEPARATING:
            ms.append(np.array([s.cell_mean]))
            gs.append(np.array([width]))
            continue
        cuts = [s.lo, s.hi]
        if s.lo < mu < s.hi:
            cuts = [s.lo, mu, s.hi]
        for a, b in zip(cuts, cuts[1:]):
            k = max(1, int(np.ceil((b - a) * cells_per_unit)))
            edges = np.linspace(a, b, k + 1)
            ms.append(0.5 * (edges[:-1] + edges[1:]))
            gs.append(np.diff(edges))
    return MeanDistribution(np.concatenate(ms), np.concatenate(gs), tol)


def relaxed_value(schedule: Schedule, tie: TieBreak | None = None) -> float:
    """``int R dG`` for the mean distribution induced by `schedule`.

    Pooled and excluded cells contribute atoms; separating segments
    contribute their continuum of means.  Prices follow ``R`` (that is, the
    sequentially rational price with tie rule `tie`), not the schedule.
    """
    p = schedule.params
    tie = schedule.tie if tie is None else tie
    rf = RFunction(p)
    total = 0.0
    for s in schedule.segments:
        if s.kind is SegmentKind.SEPARATING:
            total += integrate_R_prior(s.lo, s.hi, p, tie)
        else:
            total += (s.hi - s.lo) * R(s.cell_mean, rf, tie)
    return total
