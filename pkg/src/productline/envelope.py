"""Transfer recovery from the envelope condition.

Given a quality schedule and the set of types that face the low period-2
price, incentive compatibility pins down utility up to a constant:

    U'(theta) = q1(theta) + delta_v * 1{price2(theta) = v_L},   U(0) = 0,

and the period-1 transfer is then
``x1 = theta q1 + theta delta_v 1{v_L} - U``.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .model import Schedule

DEFAULT_GRID = 10_001


def envelope_transfers(schedule: Schedule, n: int = DEFAULT_GRID):
    """Integrate ``U'`` with the trapezoid rule and recover transfers.

    Each segment is integrated on its own closed sub-grid, so segment edges
    appear twice in the output (once as the right end of a segment, once as
    the left end of the next) and jumps in ``U'`` are never smeared.

    Parameters
    ----------
    schedule : Schedule
    n : int
        Approximate total number of grid nodes on ``[0, 1]``.

    Returns
    -------
    theta, U, x1 : ndarray
        Nodes, recovered utility and transfers.  Each node is evaluated with
        the rules of the segment whose sub-grid it belongs to.
    """
    p = schedule.params
    thetas, utils, transfers = [], [], []
    u0 = 0.0
    for seg in schedule.segments:
        width = seg.hi - seg.lo
        if width <= 0.0:
            continue
        k = max(2, int(np.ceil(width * (n - 1))) + 1)
        t = np.linspace(seg.lo, seg.hi, k)
        low = seg.price2 == p.v_L
        q = seg.quality(t)
        slope = q + p.delta_v * low
        U = u0 + cumulative_trapezoid(slope, t, initial=0.0)
        x1 = t * q + t * p.delta_v * low - U
        thetas.append(t)
        utils.append(U)
        transfers.append(x1)
        u0 = U[-1]
    return np.concatenate(thetas), np.concatenate(utils), np.concatenate(transfers)


def envelope_utility(schedule: Schedule, n: int = DEFAULT_GRID):
    theta, U, _ = envelope_transfers(schedule, n)
    return theta, U


def closed_form_on_envelope_grid(schedule: Schedule, n: int = DEFAULT_GRID):
    """Schedule transfers evaluated segment by segment on the envelope grid."""
    vals = []
    for seg in schedule.segments:
        width = seg.hi - seg.lo
        if width <= 0.0:
            continue
        k = max(2, int(np.ceil(width * (n - 1))) + 1)
        vals.append(seg.transfer(np.linspace(seg.lo, seg.hi, k)))
    return np.concatenate(vals)
