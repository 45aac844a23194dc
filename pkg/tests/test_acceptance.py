"""Acceptance criteria, one PASS/FAIL line each.

The lines are written past pytest's output capture so they show up in a
plain ``pytest -v`` run.
"""
import csv
import io
import json
import time

import numpy as np
import pytest
from scipy import ndimage

from productline import (
    classify,
    commitment_revenue,
    commitment_schedule,
    l_threshold,
    limited_schedule,
    solve_m_star_low,
    solve_pooling_interval,
)
from productline.cli import main
from productline.limited import Regime, analytic_monotone
from productline.oracle import build_certificate, solve_relaxed_lp, verify_certificate
from productline.surplus import induced_distribution, relaxed_value, schedule_virtual_value
from productline.verifier import (
    consumer_utility,
    ic_check,
    ir_check,
    sequential_rationality_check,
    transfer_revenue,
)

from conftest import make

# 12 points over the four regimes
ORACLE_POINTS = [(0.2, 0.5), (0.2, 2.0), (0.3, 0.5), (0.3, 1.0), (0.45, 2.0), (0.55, 1.0),
                 (0.6, 0.5), (0.6, 2.0), (0.75, 0.5), (0.75, 2.0), (0.9, 0.5), (0.9, 1.0)]
EXTRA_POINTS = [(0.35, 0.5), (0.35, 1.0), (0.35, 2.0)]


@pytest.fixture
def record(capsys):
    def emit(criterion, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok
    emit.capsys = capsys
    return emit


def point_id(p):
    return f"mu={p[0]}-c={p[1]}"


class TestThresholds:
    def test_c1_running_example(self, record, fig_params):
        pool = solve_pooling_interval(fig_params)
        t0 = time.perf_counter()
        for _ in range(1000):
            solve_pooling_interval(fig_params)
        per_call = (time.perf_counter() - t0) / 1000
        ell = l_threshold(2.0)
        ok = (abs(pool.m_lo - 0.5954915) <= 1e-6 and abs(pool.m_hi - 0.9045085) <= 1e-6
              and abs(2 * pool.m_lo - 1.190984) <= 1e-6 and abs(2 * pool.m_hi - 1.809016) <= 1e-6
              and abs(ell - 2 / 3) <= 1e-12 and per_call < 1e-3)
        record(1, ok, f"(m_lo, m_hi)=({pool.m_lo:.7f}, {pool.m_hi:.7f}) l(2)={ell!r} "
                      f"time={per_call * 1e6:.1f}us")
        assert ok

    def test_c2_low_mu_thresholds(self, record):
        ms = [solve_m_star_low(make(0.35, c)) for c in (0.1, 0.5, 1.0, 2.0, 10.0)]
        th = np.linspace(0, 1, 10_001)
        same = all(np.array_equal(limited_schedule(make(mu, c)).quality(th),
                                  commitment_schedule(make(mu, c)).quality(th))
                   for mu in (0.05, 0.1, 0.2, 0.25) for c in (0.5, 1.0, 2.0))
        t0 = time.perf_counter()
        for _ in range(200):
            solve_m_star_low(make(0.35, 1.0))
            limited_schedule(make(0.2, 1.0), check_transfers=False)
        per_point = (time.perf_counter() - t0) / 200
        ok = all(m == 0.7 for m in ms) and same and per_point < 1e-3
        record(2, ok, f"m*={sorted(set(ms))} identical_quality={same} "
                      f"time={per_point * 1e6:.1f}us")
        assert ok


@pytest.fixture(scope="module")
def oracle_runs():
    """LP at both grid sizes for every point, timed as a whole."""
    t0 = time.perf_counter()
    out = {}
    for mu, c in ORACLE_POINTS:
        p = make(mu, c)
        closed = relaxed_value(limited_schedule(p))
        out[(mu, c)] = {
            "closed": closed,
            "gap2001": solve_relaxed_lp(p, 2001).value - closed,
            "gap4001": solve_relaxed_lp(p, 4001).value - closed,
        }
    return out, time.perf_counter() - t0


class TestOracle:
    @pytest.mark.parametrize("point", ORACLE_POINTS, ids=point_id)
    def test_c3_lp_agreement(self, record, oracle_runs, point):
        runs, _ = oracle_runs
        r = runs[point]
        g2, g4 = abs(r["gap2001"]), abs(r["gap4001"])
        ok = g2 <= 2e-3 and g4 <= g2
        record("3", ok, f"{point} |gap|@2001={g2:.3e} |gap|@4001={g4:.3e} "
                        f"regime={classify(make(*point)).value}")
        assert ok

    def test_c3_runtime(self, record, oracle_runs):
        _, elapsed = oracle_runs
        ok = elapsed < 60
        record("3", ok, f"total LP time {elapsed:.1f}s for {len(ORACLE_POINTS)} points x 2 grids")
        assert ok

    @pytest.mark.parametrize("point", ORACLE_POINTS, ids=point_id)
    def test_c4_certificate(self, record, point):
        p = make(*point)
        rep = verify_certificate(build_certificate(p), p, induced_distribution(limited_schedule(p)))
        record("4", rep.passed,
               f"{point} convex={rep.convex_ok} dominance_slack={rep.dominance_slack:.2e} "
               f"expectation_gap={rep.expectation_gap:.2e} touching={rep.touching_gap:.2e}")
        assert rep.passed


class TestIncentives:
    @pytest.mark.parametrize("point", ORACLE_POINTS, ids=point_id)
    def test_c5_ic_ir(self, record, point):
        p = make(*point)
        s = limited_schedule(p)
        t0 = time.perf_counter()
        ic = ic_check(s, 2001, 2001)
        ir = ir_check(s, 2001)
        u0 = consumer_utility(0.0, 0.0, s)
        elapsed = time.perf_counter() - t0
        regime = classify(p)
        if regime is Regime.MU_HALF_TO_L:
            ok = ic > 1e-4
            what = "expected violation"
        elif analytic_monotone(p):
            ok = ic <= 1e-4 and ir >= -1e-9 and u0 == 0.0
            what = "expected IC/IR"
        else:
            with record.capsys.disabled():
                print(f"\n[SKIP] criterion 5: {point} {regime.value} is outside its scope "
                      f"(ic={ic:.3e})")
            pytest.skip(f"{point} is neither analytically monotone nor MuHalfToL")
        ok = ok and elapsed < 30
        record("5", ok, f"{point} {regime.value} {what}: ic={ic:.3e} minU={ir:.3e} U(0)={u0} "
                        f"time={elapsed:.2f}s")
        assert ok

    def test_c6_sequential_rationality(self, record):
        bad = [pt for pt in ORACLE_POINTS + EXTRA_POINTS
               if not sequential_rationality_check(limited_schedule(make(*pt)))]
        fails = []
        for pt in ORACLE_POINTS:
            if pt[0] <= 0.5:
                continue
            res = sequential_rationality_check(commitment_schedule(make(*pt)))
            hit = [o for o in res.offending
                   if o["lo"] >= pt[0] - 1e-12 and o["hi"] > o["lo"] and o["price2"] == pt[0]]
            if res.ok or not hit:
                fails.append(pt)
        ok = not bad and not fails
        record(6, ok, f"limited failures={bad} commitment points not flagged={fails}")
        assert ok


class TestRevenue:
    def test_c7_ordering(self, record):
        lines, ok = [], True
        for pt in ORACLE_POINTS + EXTRA_POINTS:
            p = make(*pt)
            s = limited_schedule(p)
            lim = schedule_virtual_value(s)
            by_transfers = transfer_revenue(s)
            gap = commitment_revenue(p) - lim
            good = gap >= -1e-12 and abs(by_transfers - lim) <= 1e-8
            if pt[0] <= 0.25:
                good = good and abs(gap) <= 1e-9
            if pt[0] in (0.35, 0.75):
                good = good and gap >= 1e-4
            ok = ok and good
            lines.append(f"{pt}:{gap:.2e}")
        record(7, ok, "commitment - limited: " + " ".join(lines))
        assert ok


class TestMonotonicityRegion:
    def test_c8_sweep(self, record):
        buf = io.StringIO()
        t0 = time.perf_counter()
        code = main(["sweep", "--mu-range", "0.5:1:51", "--c-range", "0.1:2:39"], out=buf)
        elapsed = time.perf_counter() - t0
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        mus = sorted({float(r["mu"]) for r in rows})
        cs = sorted({float(r["c"]) for r in rows})
        fail = np.zeros((len(mus), len(cs)), dtype=bool)
        half_to_l = np.zeros_like(fail)
        flag_ok = True
        n_flagged = 0
        for r in rows:
            i, j = mus.index(float(r["mu"])), cs.index(float(r["c"]))
            fail[i, j] = r["monotoneNumeric"] == "false"
            half_to_l[i, j] = r["regime"] == Regime.MU_HALF_TO_L.value
            disagree = r["monotoneStated"] != r["monotoneDerived"]
            flag_ok &= (r["statedVsDerivedDisagree"] == "true") == disagree
            n_flagged += disagree
        _, n_components = ndimage.label(fail)
        per_row = fail.sum(axis=1)
        shrinks = bool(np.all(np.diff(per_row) <= 0)) and per_row[-1] == 0
        ok = (code == 0 and n_components == 1 and bool(np.all(fail[half_to_l]))
              and shrinks and flag_ok and n_flagged > 0 and elapsed < 120)
        record(8, ok, f"{len(rows)} rows, components={n_components}, "
                      f"MuHalfToL covered={bool(np.all(fail[half_to_l]))}, "
                      f"row counts nonincreasing={shrinks}, stated/derived disagreements "
                      f"flagged={n_flagged}, time={elapsed:.1f}s")
        assert ok


class TestFigure:
    def test_c9_plot_sidecar(self, record, tmp_path):
        out = tmp_path / "fig.svg"
        code = main(["plot", "--vl", "0.75", "--vh", "1", "--c", "2", "--out", str(out)],
                    out=io.StringIO())
        segs = json.loads(out.with_suffix(".json").read_text())["curves"]["limited"]
        expected = [
            ("flat", 0.0, 0.5, True, False, 0.0),
            ("affine", 0.5, 0.595492, True, False, None),
            ("flat", 0.595492, 0.904508, True, True, 0.25),
            ("affine", 0.904508, 1.0, False, True, None),
        ]
        ok = code == 0 and len(segs) == len(expected)
        for s, (kind, lo, hi, clo, chi, level) in zip(segs, expected):
            ok &= (s["kind"] == kind and abs(s["lo"] - lo) <= 1e-6 and abs(s["hi"] - hi) <= 1e-6
                   and s["closedLo"] == clo and s["closedHi"] == chi)
            if level is not None:
                ok &= abs(s["qLo"] - level) <= 1e-12 and abs(s["qHi"] - level) <= 1e-12
        shape = ", ".join(f"{s['kind']}[{s['lo']:.6f},{s['hi']:.6f}]" for s in segs)
        record(9, ok, shape)
        assert ok
