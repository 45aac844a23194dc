"""First-best and full-commitment benchmarks.

With commitment the firm posts one period-2 price for everyone and screens
period-1 quality in the textbook way: types below ``1/2`` are excluded and
types above get ``(2 theta - 1)/c``.
"""
from __future__ import annotations

import numpy as np

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


def first_best_quality(theta, params: ModelParams):
    """Efficient quality ``theta / c`` (maximizes ``theta q - c q**2 / 2``)."""
    check_type(theta)
    q = np.asarray(theta, dtype=float) / params.c
    return float(q) if q.ndim == 0 else q


def commitment_quality(theta, params: ModelParams):
    """Second-best quality: ``0`` below ``1/2``, ``(2 theta - 1)/c`` above."""
    check_type(theta)
    q = np.maximum(0.0, (2.0 * np.asarray(theta, dtype=float) - 1.0) / params.c)
    return float(q) if q.ndim == 0 else q


def commitment_price2(params: ModelParams) -> float:
    """Committed period-2 price: ``v_H`` if ``mu_bar <= 1/2``, else ``v_L``."""
    return params.v_H if params.mu_bar <= 0.5 else params.v_L


def commitment_schedule(params: ModelParams) -> Schedule:
    """Exclusion on ``[0, 1/2)`` and separation on ``[1/2, 1]``.

    Transfers come from the envelope condition with ``U(0) = 0``.  Under
    either committed price the continuation rent ``theta * delta_v`` (when
    the price is ``v_L``) is left with the consumer, so excluded types pay
    nothing and separating types pay ``(theta**2 - 1/4)/c``.
    """
    validate(params)
    c = params.c
    price = commitment_price2(params)
    tie = TieBreak.FAVOR_HIGH if price == params.v_H else TieBreak.FAVOR_LOW
    return Schedule(
        params=params,
        regime=ScheduleRegime.FULL_COMMITMENT,
        segments=(
            Segment(0.0, 0.5, SegmentKind.EXCLUSION, QualityRule.const(0.0),
                    TransferRule.const(0.0), price, cell_mean=0.25),
            Segment(0.5, 1.0, SegmentKind.SEPARATING, QualityRule.separating(c),
                    TransferRule(-0.25 / c, 0.0, 1.0 / c), price),
        ),
        tie=tie,
    )


def first_best_schedule(params: ModelParams) -> Schedule:
    """Efficient benchmark: quality ``theta / c`` and trade in period 2 always.

    Transfers extract the whole period-1 gross value ``theta q``; the
    schedule is a surplus benchmark and is not meant to be incentive
    compatible.
    """
    validate(params)
    c = params.c
    return Schedule(
        params=params,
        regime=ScheduleRegime.FIRST_BEST,
        segments=(
            Segment(0.0, 1.0, SegmentKind.SEPARATING, QualityRule(1.0 / c, 0.0),
                    TransferRule(0.0, 0.0, 1.0 / c), params.v_L),
        ),
        tie=TieBreak.FAVOR_LOW,
    )


def commitment_revenue(params: ModelParams) -> float:
    """Closed-form value of the committed mechanism.

    ``int_{1/2}^1 (2 theta - 1)**2 / (2c) dtheta = 1/(12c)`` from period 1
    plus ``max(v_H / 2, v_L)`` from period 2.
    """
    validate(params)
    period2 = params.v_H / 2.0 if params.mu_bar <= 0.5 else params.v_L
    return 1.0 / (12.0 * params.c) + period2


def first_best_surplus(params: ModelParams) -> float:
    """Total surplus with efficient quality and full period-2 trade.

    ``int theta**2 / (2c) dtheta + E[v] = 1/(6c) + (v_H + v_L)/2``.
    """
    validate(params)
    return 1.0 / (6.0 * params.c) + 0.5 * (params.v_H + params.v_L)
