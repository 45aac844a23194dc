"""Sequentially rational period-2 posted price as a function of the posterior mean."""
from __future__ import annotations

import numpy as np

from .model import ModelParams, TieBreak, check_type

__all__ = ["TieBreak", "TIE_BAND", "serves_low", "period2_price", "period2_revenue"]

#: means within this distance of ``mu_bar`` are treated as exact ties
TIE_BAND = 1e-12


def serves_low(mean, params: ModelParams, tie: TieBreak):
    """True where the firm posts ``v_L`` (serving both valuations).

    This is ``q2*(v_L)`` in ``{0, 1}`` expressed as a boolean.  Scalars in,
    Python bools out; arrays in, boolean arrays out.
    """
    check_type(mean, "mean")
    m = np.asarray(mean, dtype=float)
    mu = params.mu_bar
    at_tie = np.abs(m - mu) <= TIE_BAND
    low = np.where(at_tie, tie is TieBreak.FAVOR_LOW, m < mu)
    return bool(low) if low.ndim == 0 else low


def period2_price(mean, params: ModelParams, tie: TieBreak):
    """Posted period-2 price: ``v_L`` below ``mu_bar``, ``v_H`` above.

    Examples
    --------
    >>> p = ModelParams.create(0.5, 1.0, 1.0)
    >>> period2_price(0.2, p, TieBreak.FAVOR_HIGH)
    0.5
    >>> period2_price(0.5, p, TieBreak.FAVOR_LOW)
    0.5
    """
    low = serves_low(mean, params, tie)
    out = np.where(low, params.v_L, params.v_H)
    return float(out) if out.ndim == 0 else out


def period2_revenue(mean, params: ModelParams, tie: TieBreak):
    """Expected period-2 revenue at posterior mean `mean`.

    Equal to ``max(mean * v_H, v_L)`` away from the tie; at the tie the two
    branches agree to within ``TIE_BAND * v_H``.
    """
    low = serves_low(mean, params, tie)
    m = np.asarray(mean, dtype=float)
    out = np.where(low, params.v_L, m * params.v_H)
    return float(out) if out.ndim == 0 else out
