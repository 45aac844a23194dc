"""Domain types and parameter validation.

The model primitives are fixed: consumer types are uniform on ``[0, 1]``,
the probability of a high period-2 valuation is ``p(theta) = theta`` and
producing quality ``q`` costs ``c q**2 / 2``.  Everything configurable lives
in :class:`ModelParams`.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import (
    CapTooSmallError,
    ConsistencyError,
    DomainError,
    NonPositiveError,
    OrderingError,
    ValidationError,
)

#: default tolerance for comparing closed-form quantities
CLOSED_FORM_TOL = 1e-9


class TieBreak(enum.Enum):
    """How the period-2 price is chosen when the posterior mean equals ``mu_bar``."""

    FAVOR_LOW = "FavorLow"
    FAVOR_HIGH = "FavorHigh"


class SegmentKind(enum.Enum):
    EXCLUSION = "Exclusion"
    POOLING = "Pooling"
    SEPARATING = "Separating"


class ScheduleRegime(enum.Enum):
    FIRST_BEST = "FirstBest"
    FULL_COMMITMENT = "FullCommitment"
    LIMITED_COMMITMENT = "LimitedCommitment"


@dataclass(frozen=True)
class ModelParams:
    """Primitive triple ``(v_L, v_H, c)`` plus an optional quality cap.

    Construct freely, then pass through :func:`validate` (or use
    :meth:`create`) before handing the object to a solver.

    Attributes
    ----------
    v_L, v_H : float
        Low and high period-2 valuations.
    c : float
        Curvature of the quality cost ``c q**2 / 2``.
    quality_cap : float
        Upper bound on period-1 quality; ``inf`` by default.
    """

    v_L: float
    v_H: float
    c: float
    quality_cap: float = math.inf

    @classmethod
    def create(cls, v_L: float, v_H: float, c: float,
               quality_cap: float = math.inf) -> "ModelParams":
        return validate(cls(float(v_L), float(v_H), float(c), float(quality_cap)))

    @property
    def mu_bar(self) -> float:
        """Posterior mean at which the firm is indifferent between ``v_L`` and ``v_H``."""
        return self.v_L / self.v_H

    @property
    def delta_v(self) -> float:
        return self.v_H - self.v_L

    def to_dict(self) -> dict:
        out = {"vL": self.v_L, "vH": self.v_H, "c": self.c}
        if math.isfinite(self.quality_cap):
            out["qualityCap"] = self.quality_cap
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls.create(d["vL"], d["vH"], d["c"], d.get("qualityCap", math.inf))


def validate(params: ModelParams) -> ModelParams:
    """Check the invariants of `params` and return them unchanged.

    Raises
    ------
    NonPositiveError
        If ``v_L <= 0`` or ``c <= 0`` (or any primitive is not finite).
    OrderingError
        If ``v_L >= v_H``.
    CapTooSmallError
        If a finite ``quality_cap`` is below ``1/c``.
    """
    for name in ("v_L", "v_H", "c"):
        val = getattr(params, name)
        if not isinstance(val, (int, float, np.floating)) or not math.isfinite(val):
            raise NonPositiveError(f"{name} must be a finite number, got {val!r}")
    if params.c <= 0:
        raise NonPositiveError(f"c must be positive, got {params.c}")
    if params.v_L <= 0:
        raise NonPositiveError(f"v_L must be positive, got {params.v_L}")
    if params.v_L >= params.v_H:
        raise OrderingError(f"need v_L < v_H, got v_L={params.v_L}, v_H={params.v_H}")
    if math.isnan(params.quality_cap):
        raise NonPositiveError("quality_cap is NaN")
    if params.quality_cap < 1.0 / params.c:
        raise CapTooSmallError(
            f"quality_cap={params.quality_cap} is below the top quality 1/c={1.0 / params.c}")
    return params


class Prior:
    """Uniform prior on ``[0, 1]`` with ``p(theta) = theta``.  Not configurable."""

    mean = 0.5

    @staticmethod
    def cdf(theta):
        return np.clip(theta, 0.0, 1.0)

    @staticmethod
    def pdf(theta):
        theta = np.asarray(theta, dtype=float)
        return np.where((theta >= 0) & (theta <= 1), 1.0, 0.0)

    @staticmethod
    def p(theta):
        return theta

    @staticmethod
    def conditional_mean(lo: float, hi: float) -> float:
        return 0.5 * (lo + hi)

    @staticmethod
    def call_value(t):
        """``E[(theta - t)^+]`` under the prior, for ``t`` in ``[0, 1]``."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return 0.5 * (1.0 - t) ** 2


def check_type(theta, name: str = "theta"):
    """Raise :class:`DomainError` unless every entry of `theta` is in ``[0, 1]``."""
    arr = np.asarray(theta, dtype=float)
    if arr.size and (np.any(~np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return theta


# --------------------------------------------------------------------------
# Schedule building blocks


@dataclass(frozen=True)
class QualityRule:
    """Quality as an affine function ``slope * theta + intercept``.

    A constant rule has ``slope == 0``.
    """

    slope: float
    intercept: float

    @classmethod
    def const(cls, value: float) -> "QualityRule":
        return cls(0.0, float(value))

    @classmethod
    def separating(cls, c: float) -> "QualityRule":
        """The rule ``theta -> (2 theta - 1)/c``."""
        return cls(2.0 / c, -1.0 / c)

    @property
    def is_const(self) -> bool:
        return self.slope == 0.0

    def __call__(self, theta):
        return self.slope * np.asarray(theta, dtype=float) + self.intercept

    def to_dict(self) -> dict:
        if self.is_const:
            return {"type": "const", "value": self.intercept}
        return {"type": "affine", "slope": self.slope, "intercept": self.intercept}

    @classmethod
    def from_dict(cls, d: dict) -> "QualityRule":
        if d["type"] == "const":
            return cls.const(d["value"])
        if d["type"] == "affine":
            return cls(float(d["slope"]), float(d["intercept"]))
        raise ValidationError(f"unknown quality rule type {d['type']!r}")


@dataclass(frozen=True)
class TransferRule:
    """Transfer as a quadratic ``a2 theta**2 + a1 theta + a0``."""

    a0: float
    a1: float = 0.0
    a2: float = 0.0

    @classmethod
    def const(cls, value: float) -> "TransferRule":
        return cls(float(value))

    @property
    def is_const(self) -> bool:
        return self.a1 == 0.0 and self.a2 == 0.0

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (self.a2 * theta + self.a1) * theta + self.a0

    def shifted(self, delta: float) -> "TransferRule":
        return replace(self, a0=self.a0 + delta)

    def to_json(self):
        if self.is_const:
            return self.a0
        return {"type": "quadratic", "coeffs": [self.a0, self.a1, self.a2]}

    @classmethod
    def from_json(cls, d) -> "TransferRule":
        if isinstance(d, (int, float)):
            return cls.const(d)
        if d.get("type") == "quadratic":
            a0, a1, a2 = d["coeffs"]
            return cls(float(a0), float(a1), float(a2))
        raise ValidationError(f"unknown transfer encoding {d!r}")


@dataclass(frozen=True)
class Segment:
    """One cell (or a run of singleton cells) of a product line.

    Segments are half-open ``[lo, hi)`` except the last one in a schedule,
    which also contains ``hi = 1``.  For separating segments every type is
    its own cell and `cell_mean` is ``None``.
    """

    lo: float
    hi: float
    kind: SegmentKind
    quality: QualityRule
    transfer: TransferRule
    price2: float
    cell_mean: float | None = None

    def mean_at(self, theta):
        if self.kind is SegmentKind.SEPARATING:
            return theta
        return np.full_like(np.asarray(theta, dtype=float), self.cell_mean)

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "kind": self.kind.value,
            "quality": self.quality.to_dict(),
            "transfer": self.transfer.to_json(),
            "price2": self.price2,
            "cellMean": self.cell_mean,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Segment":
        return cls(
            lo=float(d["lo"]),
            hi=float(d["hi"]),
            kind=SegmentKind(d["kind"]),
            quality=QualityRule.from_dict(d["quality"]),
            transfer=TransferRule.from_json(d["transfer"]),
            price2=float(d["price2"]),
            cell_mean=None if d.get("cellMean") is None else float(d["cellMean"]),
        )


@dataclass(frozen=True)
class Schedule:
    """A piecewise product line with transfers and period-2 prices.

    Parameters
    ----------
    params : ModelParams
    regime : ScheduleRegime
    segments : tuple of Segment
        Ordered, partitioning ``[0, 1]``.
    tie : TieBreak
        Tie rule the period-2 prices were computed with.
    case : str, optional
        Sub-case label (for limited commitment, the regime name).
    """

    params: ModelParams
    regime: ScheduleRegime
    segments: tuple
    tie: TieBreak = TieBreak.FAVOR_LOW
    case: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def edges(self) -> np.ndarray:
        return np.array([s.lo for s in self.segments] + [self.segments[-1].hi])

    def locate(self, theta) -> np.ndarray:
        """Index of the segment containing each ``theta`` (half-open cells)."""
        theta = np.asarray(theta, dtype=float)
        inner = np.array([s.lo for s in self.segments[1:]])
        return np.searchsorted(inner, theta, side="right")

    def _gather(self, theta, fn):
        theta = np.asarray(theta, dtype=float)
        idx = self.locate(theta)
        out = np.empty(theta.shape, dtype=float)
        for k, seg in enumerate(self.segments):
            mask = idx == k
            if np.any(mask):
                out[mask] = fn(seg, theta[mask])
        return out

    def quality(self, theta):
        return self._gather(theta, lambda s, t: s.quality(t))

    def transfer(self, theta):
        return self._gather(theta, lambda s, t: s.transfer(t))

    def price2(self, theta):
        return self._gather(theta, lambda s, t: np.full_like(t, s.price2))

    def cell_mean(self, theta):
        return self._gather(theta, lambda s, t: s.mean_at(t))

    def serves_low(self, theta):
        """Boolean mask: period-2 price equals ``v_L`` for the cell of ``theta``."""
        return self.price2(theta) == self.params.v_L

    def with_segments(self, segments: Iterable[Segment]) -> "Schedule":
        return replace(self, segments=tuple(segments))

    def to_dict(self) -> dict:
        out = {
            "regime": self.regime.value,
            "params": self.params.to_dict(),
            "segments": [s.to_dict() for s in self.segments],
            "tie": self.tie.value,
        }
        if self.case is not None:
            out["case"] = self.case
        return out

    def to_json(self, **kw) -> str:
        kw.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        return cls(
            params=ModelParams.from_dict(d["params"]),
            regime=ScheduleRegime(d["regime"]),
            segments=tuple(Segment.from_dict(s) for s in d["segments"]),
            tie=TieBreak(d.get("tie", TieBreak.FAVOR_LOW.value)),
            case=d.get("case"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


def check_schedule(schedule: Schedule, tol: float = CLOSED_FORM_TOL) -> None:
    """Assert the structural invariants shared by every schedule.

    Checks that the segments partition ``[0, 1]``, that quality is
    nondecreasing (within and across segments), that pooled and excluded
    cells carry constant rules with the uniform conditional mean, and that
    every price is ``v_L`` or ``v_H``.

    Raises
    ------
    ConsistencyError
        On the first violated invariant.
    """
    segs = schedule.segments
    p = schedule.params
    if not segs:
        raise ConsistencyError("schedule has no segments")
    if abs(segs[0].lo) > tol or abs(segs[-1].hi - 1.0) > tol:
        raise ConsistencyError("segments do not cover [0, 1]")
    prev_q = -math.inf
    for k, s in enumerate(segs):
        if not (-tol <= s.lo <= s.hi <= 1.0 + tol):
            raise ConsistencyError(f"segment {k} has bad bounds [{s.lo}, {s.hi}]")
        if k and abs(segs[k - 1].hi - s.lo) > tol:
            raise ConsistencyError(f"gap or overlap between segments {k - 1} and {k}")
        if s.price2 not in (p.v_L, p.v_H):
            raise ConsistencyError(f"segment {k} price {s.price2} is neither v_L nor v_H")
        if s.kind is SegmentKind.SEPARATING:
            if s.cell_mean is not None:
                raise ConsistencyError(f"separating segment {k} should not carry a cell mean")
        else:
            if not (s.quality.is_const and s.transfer.is_const):
                raise ConsistencyError(f"{s.kind.value} segment {k} must be constant")
            if s.cell_mean is None or abs(s.cell_mean - 0.5 * (s.lo + s.hi)) > tol:
                raise ConsistencyError(f"segment {k} cell mean is not the interval midpoint")
        if s.quality.slope < 0:
            raise ConsistencyError(f"quality decreases inside segment {k}")
        q_lo = float(s.quality(s.lo))
        if q_lo < prev_q - tol:
            raise ConsistencyError(f"quality drops entering segment {k}")
        prev_q = float(s.quality(s.hi))


# --------------------------------------------------------------------------
# Mean distributions, certificates, reports


@dataclass(frozen=True)
class MeanDistribution:
    """Finitely supported distribution of posterior means.

    Weights within ``-tol`` of zero are clipped; after clipping the weights
    must sum to one and the mean must be ``1/2`` (within `tol`).
    """

    support: np.ndarray
    weights: np.ndarray
    tol: float = field(default=1e-9, compare=False)

    def __post_init__(self):
        m = np.asarray(self.support, dtype=float).ravel()
        g = np.asarray(self.weights, dtype=float).ravel()
        if m.shape != g.shape:
            raise ValidationError("support and weights must have equal length")
        check_type(m, "support")
        if np.any(g < -self.tol):
            raise ValidationError(f"negative weight {g.min():.3e}")
        g = np.clip(g, 0.0, None)
        if abs(g.sum() - 1.0) > self.tol:
            raise ValidationError(f"weights sum to {g.sum():.12f}, not 1")
        if abs(g @ m - 0.5) > self.tol:
            raise ValidationError(f"mean is {g @ m:.12f}, not 1/2")
        order = np.argsort(m, kind="stable")
        object.__setattr__(self, "support", m[order])
        object.__setattr__(self, "weights", g[order])

    @property
    def mean(self) -> float:
        return float(self.weights @ self.support)

    def call_value(self, t):
        """``E_G[(m - t)^+]`` for each entry of `t`."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.maximum(self.support[None, :] - t[:, None], 0.0) @ self.weights

    def compact(self, min_weight: float = 0.0) -> "MeanDistribution":
        keep = self.weights > min_weight
        w = self.weights[keep]
        return MeanDistribution(self.support[keep], w / w.sum(), self.tol)

    def clusters(self, gap: float, min_weight: float = 1e-12):
        """Group nearby support points; return ``(mean, mass)`` per cluster."""
        keep = self.weights > min_weight
        m, g = self.support[keep], self.weights[keep]
        if m.size == 0:
            return []
        out = []
        start = 0
        for i in range(1, m.size + 1):
            if i == m.size or m[i] - m[i - 1] > gap:
                mass = g[start:i].sum()
                out.append((float(g[start:i] @ m[start:i] / mass), float(mass)))
                start = i
        return out

    def to_list(self, min_weight: float = 0.0) -> list:
        return [{"m": float(m), "g": float(g)}
                for m, g in zip(self.support, self.weights) if g > min_weight]


@dataclass(frozen=True)
class DualCertificate:
    """Convex function used to certify optimality of a mean distribution.

    The function is piecewise: on each interval between consecutive
    `breakpoints` it either interpolates linearly or coincides with the
    payoff function ``R`` (when the matching entry of `follows_R` is true).

    Attributes
    ----------
    breakpoints : tuple of (float, float)
        ``(m, pi(m))`` pairs, ascending in ``m``, spanning ``[0, 1]``.
    follows_R : tuple of bool
        One flag per interval.
    params : ModelParams
    tie : TieBreak
        Tie rule used when a piece follows ``R``.
    """

    breakpoints: tuple
    follows_R: tuple
    params: ModelParams
    tie: TieBreak = TieBreak.FAVOR_LOW

    def __post_init__(self):
        bp = tuple((float(m), float(v)) for m, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "follows_R", tuple(bool(f) for f in self.follows_R))
        if len(self.follows_R) != len(bp) - 1:
            raise ValidationError("need exactly one piece flag per interval")
        xs = [m for m, _ in bp]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError("breakpoints must be strictly increasing")

    def to_dict(self) -> dict:
        return {
            "breakpoints": [[m, v] for m, v in self.breakpoints],
            "followsR": list(self.follows_R),
        }


@dataclass
class VerificationReport:
    """Worst-case violations found by the brute-force verifier.

    All violation magnitudes are nonnegative; ``ir_violation`` is
    ``max(0, -min U)``.
    """

    ic_violation: float = 0.0
    ir_violation: float = 0.0
    min_utility: float = 0.0
    bp_violation: float = 0.0
    bp_ok: bool = True
    monotonicity_ok: bool = True
    worst_drop: float = 0.0
    worst_drop_at: float | None = None
    seq_rationality_ok: bool = True
    offending_cells: list = field(default_factory=list)
    revenue_gap: float = 0.0
    grid_sizes: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def passed(self, ic_tol: float = 1e-4, ir_tol: float = 1e-9,
               revenue_tol: float = 1e-6) -> bool:
        return (self.ic_violation <= ic_tol and self.ir_violation <= ir_tol
                and self.bp_ok and self.seq_rationality_ok and self.monotonicity_ok
                and self.revenue_gap <= revenue_tol)

    def to_dict(self) -> dict:
        return {
            "icViolation": self.ic_violation,
            "irViolation": self.ir_violation,
            "minUtility": self.min_utility,
            "bpOk": self.bp_ok,
            "bpViolation": self.bp_violation,
            "monotonicityOk": self.monotonicity_ok,
            "worstDrop": self.worst_drop,
            "worstDropAt": self.worst_drop_at,
            "seqRatOk": self.seq_rationality_ok,
            "offendingCells": self.offending_cells,
            "revenueGap": self.revenue_gap,
            "gridSizes": self.grid_sizes,
            "notes": self.notes,
        }

