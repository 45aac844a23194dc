"""Brute-force checks on the closed-form solutions.

Three independent routes to the optimal mean distribution:

* a linear program over distributions on a grid of posterior means, subject
  to Bayes plausibility and convex-order dominance by the prior;
* an exhaustive search over product lines with one bottom exclusion cell
  and at most one pooled cell;
* a convex dual function ``pi >= R`` whose expectation is the same under
  the prior and under the candidate distribution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import quad
from scipy.optimize import linprog

from .errors import InfeasibleError, ProductLineError, UnboundedError, ValidationError
from .limited import Regime, classify, limited_schedule, solve_pooling_interval
from .model import DualCertificate, MeanDistribution, ModelParams, Prior, TieBreak, validate
from .surplus import R, RFunction, relaxed_value

MIN_GRID = 101
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def mean_grid(params: ModelParams, grid_size: int) -> np.ndarray:
    """Uniform grid on ``[0, 1]`` that also contains ``1/2`` and ``mu_bar``."""
    if grid_size < MIN_GRID:
        raise ValidationError(f"grid_size={grid_size} is below the minimum {MIN_GRID}")
    base = np.linspace(0.0, 1.0, grid_size)
    return np.unique(np.concatenate([base, [0.5, params.mu_bar]]))


def tie_values(m, params: ModelParams, tie: TieBreak | None):
    """R on the grid; with ``tie=None`` the firm-preferred branch at the tie."""
    rf = RFunction(params)
    if tie is not None:
        return np.asarray(R(m, rf, tie), dtype=float)
    return rf.best(m)


@dataclass
class LPInstance:
    """Discretised relaxed program.

    Attributes
    ----------
    mean_grid : ndarray
        Ascending abscissae; also the convex-order test points ``t``.
    columns : ndarray of int
        Grid index of each support variable.  ``mu_bar`` gets two columns
        when both tie branches are allowed.
    objective : ndarray
        ``R`` value of each support variable.
    mpc_rhs : ndarray
        ``E_prior[(theta - t)^+] = (1 - t)**2 / 2`` at each grid point.
    """

    mean_grid: np.ndarray
    columns: np.ndarray
    objective: np.ndarray
    mpc_rhs: np.ndarray

    @classmethod
    def build(cls, params: ModelParams, grid_size: int,
              tie: TieBreak | None = None) -> "LPInstance":
        grid = mean_grid(params, grid_size)
        n = grid.size
        rf = RFunction(params)
        if tie is None:
            k_mu = int(np.flatnonzero(grid == params.mu_bar)[0])
            cols = np.concatenate([np.arange(n), [k_mu]])
            obj = np.asarray(R(grid, rf, TieBreak.FAVOR_LOW), dtype=float)
            obj = np.concatenate([obj, [R(params.mu_bar, rf, TieBreak.FAVOR_HIGH)]])
        else:
            cols = np.arange(n)
            obj = np.asarray(R(grid, rf, tie), dtype=float)
        return cls(grid, cols, obj, Prior.call_value(grid))

    def matrices(self):
        """Sparse equality system in variables ``(g, T, S)``.

        ``T_k`` is the mass strictly above ``t_k`` and ``S_k`` is
        ``sum_j g_j (m_j - t_k)^+``; both follow short recursions, which keeps
        the matrix at ``O(n)`` nonzeros instead of ``O(n**2)``.
        """
        t = self.mean_grid
        n, p = t.size, self.columns.size
        h = np.diff(t)
        T0, S0 = p, p + n
        k = np.arange(n - 1)
        # T_k - T_{k+1} - sum(g at k+1) = 0
        r_T = np.concatenate([k, k, [n - 1]])
        c_T = np.concatenate([T0 + k, T0 + k + 1, [T0 + n - 1]])
        v_T = np.concatenate([np.ones(n - 1), -np.ones(n - 1), [1.0]])
        j_inner = np.flatnonzero(self.columns >= 1)
        r_g = self.columns[j_inner] - 1
        # S_k - S_{k+1} - h_k T_k = 0
        r_S = n + np.concatenate([k, k, k, [n - 1]])
        c_S = np.concatenate([S0 + k, S0 + k + 1, T0 + k, [S0 + n - 1]])
        v_S = np.concatenate([np.ones(n - 1), -np.ones(n - 1), -h, [1.0]])
        # sum g = 1, sum g m = 1/2
        j = np.arange(p)
        rows = np.concatenate([r_T, r_g, r_S, np.full(p, 2 * n), np.full(p, 2 * n + 1)])
        cols = np.concatenate([c_T, j_inner, c_S, j, j])
        vals = np.concatenate([v_T, -np.ones(j_inner.size), v_S, np.ones(p),
                               t[self.columns]])
        A = sp.csr_matrix((vals, (rows, cols)), shape=(2 * n + 2, p + 2 * n))
        b = np.zeros(2 * n + 2)
        b[2 * n], b[2 * n + 1] = 1.0, 0.5
        upper = np.concatenate([np.full(p + n, np.inf), self.mpc_rhs])
        bounds = np.column_stack([np.zeros(p + 2 * n), upper])
        cost = np.concatenate([-self.objective, np.zeros(2 * n)])
        return cost, A, b, bounds


@dataclass
class LPResult:
    distribution: MeanDistribution
    value: float
    instance: LPInstance = field(repr=False)
    method: str = "highs-ds"


def solve_relaxed_lp(params: ModelParams, grid_size: int = 2001,
                     tie: TieBreak | None = None, method: str = "highs-ds") -> LPResult:
    """Maximize ``sum g_i R(m_i)`` over grid distributions dominated by the prior.

    Parameters
    ----------
    params : ModelParams
    grid_size : int
        Number of uniform grid points (``1/2`` and ``mu_bar`` are added).
    tie : TieBreak or None
        Period-2 tie rule at ``mu_bar``; ``None`` lets the program pick the
        firm-preferred branch by offering both.
    method : str
        HiGHS variant passed to :func:`scipy.optimize.linprog`.  The dual
        simplex default is deterministic and returns a vertex.

    Raises
    ------
    InfeasibleError, UnboundedError
        Both indicate a construction bug; neither can occur for valid input.
    """
    validate(params)
    inst = LPInstance.build(params, grid_size, tie)
    cost, A, b, bounds = inst.matrices()
    res = linprog(cost, A_eq=A, b_eq=b, bounds=bounds, method=method, options=LP_OPTIONS)
    if res.status == 2:
        raise InfeasibleError(res.message)
    if res.status == 3:
        raise UnboundedError(res.message)
    if res.status != 0:
        raise ProductLineError(f"LP solver failed: {res.message}")
    g = res.x[: inst.columns.size]
    G = MeanDistribution(inst.mean_grid[inst.columns], g, tol=1e-8)
    return LPResult(G, float(inst.objective @ g), inst, method)


def check_convex_order(G: MeanDistribution, n_test: int = 1001, tol: float = 1e-9):
    """Bayes plausibility and dominance of `G` by the uniform prior.

    Returns
    -------
    ok : bool
    worst : float
        Largest excess of ``E_G[(m - t)^+]`` over the prior's value, or the
        mean error if that is larger.
    """
    t = np.linspace(0.0, 1.0, n_test)
    excess = float(np.max(G.call_value(t) - Prior.call_value(t)))
    worst = max(excess, abs(G.mean - 0.5))
    return worst <= tol, worst


# --------------------------------------------------------------------------
# Partition search


@dataclass
class PartitionResult:
    """Best product line of the form: atom on ``[0, a)``, reveal ``[a, b)``,
    atom on ``[b, d]``, reveal ``(d, 1]``.  ``b == d`` means no pooled cell."""

    a: float
    b: float
    d: float
    value: float

    @property
    def has_pool(self) -> bool:
        return self.d > self.b

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "d": self.d, "value": self.value}


def _cum_integral_vec(x: np.ndarray, params: ModelParams) -> np.ndarray:
    mu, c = params.mu_bar, params.c
    dv, vl, vh = params.delta_v, params.v_L, params.v_H
    x = np.asarray(x, dtype=float)
    lo = np.minimum(x, mu)
    hi = np.maximum(x, mu)
    low_part = dv * lo * lo + (2.0 * vl - vh) * lo
    high_part = 0.5 * vh * (hi * hi - mu * mu)
    q = np.maximum(2.0 * x - 1.0, 0.0) ** 3 / (12.0 * c)
    return low_part + high_part + q


def partition_search(params: ModelParams, grid_size: int = 2001,
                     tie: TieBreak | None = None) -> PartitionResult:
    """Exhaustive search over one exclusion cell plus at most one pooled cell.

    Endpoints range over the grid, plus the off-grid candidates whose cell
    mean is exactly ``mu_bar`` (``a = 2 mu_bar`` and ``d = 2 mu_bar - b``),
    which the tie at ``mu_bar`` makes special.  Cost is ``O(n**2)`` via a
    running maximum over the exclusion threshold; ties go to the largest
    ``a`` and then the first ``(b, d)`` found.
    """
    validate(params)
    mu = params.mu_bar
    grid = np.linspace(0.0, 1.0, grid_size)

    def rstar(m):
        return tie_values(m, params, tie)

    I1 = float(_cum_integral_vec(np.array(1.0), params))
    # f(a) = a R(a/2) - I(a); candidates sorted so the running max is valid
    a_cand = np.unique(np.concatenate([grid, [2.0 * mu] if 2.0 * mu <= 1.0 else []]))
    f = a_cand * rstar(a_cand / 2.0) - _cum_integral_vec(a_cand, params)
    run_val = np.empty_like(f)
    run_arg = np.empty(f.size, dtype=int)
    best_v, best_k = -np.inf, 0
    for k, v in enumerate(f):
        if v >= best_v:
            best_v, best_k = v, k
        run_val[k], run_arg[k] = best_v, best_k

    best = PartitionResult(0.0, 0.0, 0.0, -np.inf)
    Ig = _cum_integral_vec(grid, params)
    for i, b in enumerate(grid):
        k = np.searchsorted(a_cand, b, side="right") - 1
        head = run_val[k] + Ig[i]
        ds = grid[i:]
        extra = 2.0 * mu - b
        if b <= extra <= 1.0:
            ds = np.append(ds, extra)
        tail = (ds - b) * rstar(0.5 * (b + ds)) + I1 - _cum_integral_vec(ds, params)
        j = int(np.argmax(tail))
        val = head + tail[j]
        if val > best.value + 1e-15:
            best = PartitionResult(float(a_cand[run_arg[k]]), float(b), float(ds[j]), float(val))
    return best


# --------------------------------------------------------------------------
# Dual certificates


def build_certificate(params: ModelParams) -> DualCertificate:
    """Convex majorant of ``R`` supporting the closed-form distribution.

    * ``mu_bar <= 1/4``: the line ``m v_H`` up to ``1/2``, then ``R``.
    * ``1/4 < mu_bar < 1/2``: the line through ``(mu_bar, R(mu_bar))`` and
      ``(2 mu_bar, R(2 mu_bar))`` up to ``2 mu_bar``, then ``R``.
    * ``mu_bar >= 1/2``: ``R`` outside the pooled cell and the chord of
      ``R`` across it.
    """
    validate(params)
    rf = RFunction(params)
    regime = classify(params)
    vh, mu = params.v_H, params.mu_bar
    if regime is Regime.MU_LE_QUARTER:
        tie = TieBreak.FAVOR_HIGH
        bps = [(0.0, 0.0), (0.5, 0.5 * vh), (1.0, R(1.0, rf, tie))]
        flags = [False, True]
    elif regime is Regime.MU_QUARTER_TO_HALF:
        tie = TieBreak.FAVOR_HIGH
        m = 2.0 * mu
        r_mu, r_m = R(mu, rf, tie), R(m, rf, tie)
        slope = (r_m - r_mu) / (m - mu)
        bps = [(0.0, r_mu - slope * mu), (m, r_m)]
        flags = [False]
        if m < 1.0:
            bps.append((1.0, R(1.0, rf, tie)))
            flags.append(True)
    else:
        tie = TieBreak.FAVOR_LOW
        pool = solve_pooling_interval(params)
        lo, hi = pool.m_lo, pool.m_hi
        bps, flags = [(0.0, R(0.0, rf, tie))], []
        if lo > 0.0:
            bps.append((lo, R(lo, rf, tie)))
            flags.append(True)
        if hi > lo:
            bps.append((hi, R(hi, rf, TieBreak.FAVOR_HIGH)))
            flags.append(False)
        if hi < 1.0:
            bps.append((1.0, R(1.0, rf, tie)))
            flags.append(True)
    return DualCertificate(tuple(bps), tuple(flags), params, tie)


def certificate_value(pi: DualCertificate, m) -> np.ndarray:
    """Evaluate ``pi`` at `m` (scalar or array)."""
    m = np.asarray(m, dtype=float)
    xs = np.array([b[0] for b in pi.breakpoints])
    ys = np.array([b[1] for b in pi.breakpoints])
    out = np.interp(m, xs, ys)
    idx = np.clip(np.searchsorted(xs, m, side="right") - 1, 0, len(pi.follows_R) - 1)
    rf = RFunction(pi.params)
    for k, follows in enumerate(pi.follows_R):
        if not follows:
            continue
        mask = idx == k
        if np.any(mask):
            out[mask] = R(m[mask], rf, pi.tie)
    return out


def certificate_integral(pi: DualCertificate) -> float:
    """``E_prior[pi]`` by adaptive quadrature, piece by piece."""
    total = 0.0
    mu = pi.params.mu_bar
    for k, (a, b) in enumerate(zip(pi.breakpoints, pi.breakpoints[1:])):
        lo, hi = a[0], b[0]
        pts = [p for p in (0.5, mu) if lo < p < hi]
        val, _ = quad(lambda x: float(certificate_value(pi, np.array([x]))[0]),
                      lo, hi, points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
    return total


@dataclass
class CertificateReport:
    convex_ok: bool
    convexity_slack: float
    dominance_ok: bool
    dominance_slack: float
    expectation_ok: bool
    expectation_gap: float
    touching_ok: bool
    touching_gap: float

    @property
    def passed(self) -> bool:
        return (self.convex_ok and self.dominance_ok and self.expectation_ok
                and self.touching_ok)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "convexOk": self.convex_ok, "convexitySlack": self.convexity_slack,
            "dominanceOk": self.dominance_ok, "dominanceSlack": self.dominance_slack,
            "expectationOk": self.expectation_ok, "expectationGap": self.expectation_gap,
            "touchingOk": self.touching_ok, "touchingGap": self.touching_gap,
        }


def verify_certificate(pi: DualCertificate, params: ModelParams, G: MeanDistribution,
                       tie: TieBreak | None = None, n_dense: int = 20_001,
                       dominance_tol: float = 1e-8, expectation_tol: float = 1e-6,
                       touching_tol: float = 1e-8) -> CertificateReport:
    """Check the three optimality conditions plus convexity of `pi`.

    ``pi >= R`` is tested on a dense grid (refined with ``mu_bar`` and the
    breakpoints) against both tie branches unless `tie` pins one down.
    """
    rf = RFunction(params)
    xs = np.array([b[0] for b in pi.breakpoints])
    dense = np.unique(np.concatenate([np.linspace(0, 1, n_dense), xs, [params.mu_bar]]))
    # nodes a rounding error apart would turn a kink into a spurious slope
    dense = dense[np.concatenate([[True], np.diff(dense) > 1e-9])]
    pv = certificate_value(pi, dense)

    # convexity: slopes between consecutive dense nodes must not decrease
    slopes = np.diff(pv) / np.diff(dense)
    convexity_slack = float(min(0.0, np.min(np.diff(slopes))))
    convex_ok = convexity_slack >= -1e-7

    if tie is None:
        r = rf.best(dense)
    else:
        r = np.asarray(R(dense, rf, tie), dtype=float)
    dominance_slack = float(np.min(pv - r))

    e_prior = certificate_integral(pi)
    e_G = float(G.weights @ certificate_value(pi, G.support))
    gap = abs(e_G - e_prior)

    live = G.weights > 1e-12
    supp = G.support[live]
    r_supp = rf.best(supp) if tie is None else np.asarray(R(supp, rf, tie), dtype=float)
    touching = float(np.max(np.abs(certificate_value(pi, supp) - r_supp))) if supp.size else 0.0

    return CertificateReport(
        convex_ok=convex_ok,
        convexity_slack=convexity_slack,
        dominance_ok=dominance_slack >= -dominance_tol,
        dominance_slack=dominance_slack,
        expectation_ok=gap <= expectation_tol,
        expectation_gap=gap,
        touching_ok=touching <= touching_tol,
        touching_gap=touching,
    )


# --------------------------------------------------------------------------
# Combined report


def lp_tolerance(grid_size: int) -> float:
    """Acceptable LP-minus-closed-form gap at a given grid size."""
    return 2e-3 * 2001.0 / grid_size if grid_size < 2001 else 2e-3


@dataclass
class OracleReport:
    lp: LPResult
    closed_form: float
    partition: PartitionResult
    certificate: DualCertificate
    certificate_report: CertificateReport
    grid_size: int

    @property
    def lp_minus_closed(self) -> float:
        return self.lp.value - self.closed_form

    @property
    def lp_minus_partition(self) -> float:
        return self.lp.value - self.partition.value

    @property
    def within_tolerance(self) -> bool:
        return abs(self.lp_minus_closed) <= lp_tolerance(self.grid_size)

    def to_dict(self) -> dict:
        return {
            "value": self.lp.value,
            "closedForm": self.closed_form,
            "support": self.lp.distribution.to_list(min_weight=1e-12),
            "partition": self.partition.to_dict(),
            "certificate": {**self.certificate.to_dict(),
                            "report": self.certificate_report.to_dict()},
            "gaps": {"lpMinusClosed": self.lp_minus_closed,
                     "lpMinusPartition": self.lp_minus_partition},
            "gridSize": self.grid_size,
        }


def run_oracle(params: ModelParams, grid_size: int = 2001,
               tie: TieBreak | None = None, method: str = "highs-ds") -> OracleReport:
    from .surplus import induced_distribution

    lp = solve_relaxed_lp(params, grid_size, tie, method)
    schedule = limited_schedule(params)
    closed = relaxed_value(schedule)
    part = partition_search(params, grid_size, tie)
    pi = build_certificate(params)
    rep = verify_certificate(pi, params, induced_distribution(schedule), tie)
    return OracleReport(lp, closed, part, pi, rep, grid_size)
