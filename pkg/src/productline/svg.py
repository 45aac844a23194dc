"""Deterministic SVG rendering of quality schedules.

No plotting library: each curve is a polyline through its segment
endpoints (the schedules are piecewise affine), and open/closed endpoints
are drawn as hollow/filled dots.  A JSON sidecar records the plotted
segments so figures can be checked numerically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .model import Schedule

WIDTH, HEIGHT, MARGIN = 640, 400, 50
COLORS = {"firstbest": "#888888", "commitment": "#1f77b4", "limited": "#d62728"}


@dataclass(frozen=True)
class PlotSegment:
    lo: float
    hi: float
    kind: str  # "flat" or "affine"
    q_lo: float
    q_hi: float
    closed_lo: bool
    closed_hi: bool

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "kind": self.kind, "qLo": self.q_lo,
                "qHi": self.q_hi, "closedLo": self.closed_lo, "closedHi": self.closed_hi}


def plot_segments(schedule: Schedule) -> list:
    """Quality pieces of `schedule` with endpoint membership.

    A pooled cell is closed at both ends and steals the shared endpoint from
    its neighbours; otherwise cells are half-open ``[lo, hi)`` and the last
    one is closed at ``1``.
    """
    segs = [s for s in schedule.segments if s.hi > s.lo]
    out = []
    for k, s in enumerate(segs):
        closed_lo = True
        closed_hi = k == len(segs) - 1
        if k and segs[k - 1].kind.value == "Pooling":
            closed_lo = False
        if s.kind.value == "Pooling":
            closed_hi = True
        kind = "flat" if s.quality.is_const else "affine"
        out.append(PlotSegment(s.lo, s.hi, kind, float(s.quality(s.lo)),
                               float(s.quality(s.hi)), closed_lo, closed_hi))
    return out


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class _Canvas:
    def __init__(self, q_max: float):
        self.q_max = q_max
        self.parts: list = []

    def x(self, theta: float) -> float:
        return MARGIN + theta * (WIDTH - 2 * MARGIN)

    def y(self, q: float) -> float:
        return HEIGHT - MARGIN - q / self.q_max * (HEIGHT - 2 * MARGIN)

    def add(self, s: str):
        self.parts.append(s)


def render_svg(curves: dict, title: str = "") -> str:
    """SVG text for named lists of :class:`PlotSegment`.

    Parameters
    ----------
    curves : dict
        ``name -> list of PlotSegment``; names select colours.
    title : str
    """
    q_max = max([max(s.q_lo, s.q_hi) for segs in curves.values() for s in segs] + [1e-12])
    cv = _Canvas(q_max * 1.05)
    cv.add(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    cv.add(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    x0, x1, y0, y1 = cv.x(0), cv.x(1), cv.y(0), cv.y(cv.q_max)
    cv.add(f'<path d="M{_fmt(x0)} {_fmt(y1)} V{_fmt(y0)} H{_fmt(x1)}" '
           'stroke="black" fill="none"/>')
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        cv.add(f'<text x="{_fmt(cv.x(t))}" y="{_fmt(y0 + 18)}" font-size="11" '
               f'text-anchor="middle">{t:g}</text>')
    cv.add(f'<text x="{_fmt((x0 + x1) / 2)}" y="{HEIGHT - 8}" font-size="12" '
           'text-anchor="middle">type</text>')
    cv.add(f'<text x="14" y="{_fmt((y0 + y1) / 2)}" font-size="12" '
           f'transform="rotate(-90 14 {_fmt((y0 + y1) / 2)})" '
           'text-anchor="middle">quality</text>')
    if title:
        cv.add(f'<text x="{WIDTH / 2:g}" y="20" font-size="13" '
               f'text-anchor="middle">{title}</text>')

    for row, (name, segs) in enumerate(curves.items()):
        color = COLORS.get(name, "black")
        cv.add(f'<g id="{name}" stroke="{color}" fill="none" stroke-width="2">')
        for s in segs:
            cv.add(f'<path d="M{_fmt(cv.x(s.lo))} {_fmt(cv.y(s.q_lo))} '
                   f'L{_fmt(cv.x(s.hi))} {_fmt(cv.y(s.q_hi))}"/>')
        for k, s in enumerate(segs):
            # mark endpoints only where the curve jumps
            nxt = segs[k + 1] if k + 1 < len(segs) else None
            if nxt is not None and abs(nxt.q_lo - s.q_hi) > 1e-12:
                for theta, q, closed in ((s.hi, s.q_hi, s.closed_hi),
                                         (nxt.lo, nxt.q_lo, nxt.closed_lo)):
                    fill = color if closed else "white"
                    cv.add(f'<circle cx="{_fmt(cv.x(theta))}" cy="{_fmt(cv.y(q))}" '
                           f'r="3.5" fill="{fill}"/>')
        cv.add("</g>")
        # legend
        ly = 40 + 18 * row
        cv.add(f'<path d="M{WIDTH - 170} {ly} h24" stroke="{color}" stroke-width="2"/>')
        cv.add(f'<text x="{WIDTH - 140}" y="{ly + 4}" font-size="12">{name}</text>')

    # product line: offered qualities on a vertical bar at the right edge
    bar_x = WIDTH - MARGIN + 20
    for row, (name, segs) in enumerate(curves.items()):
        color = COLORS.get(name, "black")
        bx = bar_x + 8 * row
        for s in segs:
            if s.kind == "flat":
                cv.add(f'<circle cx="{bx}" cy="{_fmt(cv.y(s.q_lo))}" r="2.5" fill="{color}"/>')
            else:
                cv.add(f'<path d="M{bx} {_fmt(cv.y(s.q_lo))} V{_fmt(cv.y(s.q_hi))}" '
                       f'stroke="{color}" stroke-width="3"/>')
    cv.add("</svg>")
    return "\n".join(cv.parts) + "\n"


def sidecar(curves: dict, params) -> str:
    doc = {"params": params.to_dict(),
           "curves": {name: [s.to_dict() for s in segs] for name, segs in curves.items()}}
    return json.dumps(doc, indent=2) + "\n"
