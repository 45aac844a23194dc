import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from productline import (
    MeanDistribution,
    commitment_schedule,
    first_best_schedule,
    limited_schedule,
)
from productline.model import TransferRule
from productline.verifier import (
    bayes_plausibility_check,
    consumer_utility,
    ic_check,
    ir_check,
    numeric_monotonicity,
    revenue_consistency,
    sequential_rationality_check,
    transfer_revenue,
    verify_schedule,
)

from conftest import make


def shift_transfers(schedule, delta):
    segs = [s.__class__(**{**s.__dict__, "transfer": s.transfer.shifted(delta)})
            for s in schedule.segments]
    return schedule.with_segments(segs)


def zero_transfers(schedule):
    segs = [s.__class__(**{**s.__dict__, "transfer": TransferRule.const(0.0)})
            for s in schedule.segments]
    return schedule.with_segments(segs)


class TestUtility:
    def test_truthful_excluded_type(self, fig_params):
        s = limited_schedule(fig_params)
        # zero quality, low price: the only rent is from period 2
        assert consumer_utility(0.3, 0.3, s) == pytest.approx(0.3 * 0.25)

    def test_vectorised(self, fig_params):
        s = limited_schedule(fig_params)
        th = np.linspace(0, 1, 11)
        out = consumer_utility(th, th, s)
        assert out.shape == (11,)
        assert out[0] == 0.0


class TestIC:
    @pytest.mark.parametrize("mu,c", [(0.2, 1.0), (0.3, 2.0), (0.9, 0.5)])
    def test_monotone_schedules_are_ic(self, mu, c):
        assert ic_check(limited_schedule(make(mu, c)), 1001, 1001) <= 1e-4

    def test_commitment_is_ic(self, fig_params):
        assert ic_check(commitment_schedule(fig_params), 1001, 1001) <= 1e-9

    def test_half_to_l_violates(self):
        assert ic_check(limited_schedule(make(0.6, 2.0)), 1001, 1001) > 1e-2

    def test_uniform_shift_keeps_ic(self, fig_params):
        s = commitment_schedule(fig_params)
        assert ic_check(shift_transfers(s, 0.1), 501, 501) == pytest.approx(
            ic_check(s, 501, 501), abs=1e-12)

    def test_zero_transfers_break_ic(self, fig_params):
        # every type then wants the top quality
        assert ic_check(zero_transfers(commitment_schedule(fig_params)), 501, 501) > 0.1

    def test_never_negative(self):
        s = first_best_schedule(make(0.3, 1.0))
        assert ic_check(s, 201, 201) >= 0.0


class TestIR:
    @pytest.mark.parametrize("mu,c", [(0.2, 1.0), (0.35, 1.0), (0.75, 2.0), (0.6, 2.0)])
    def test_zero_type_gets_zero(self, mu, c):
        s = limited_schedule(make(mu, c))
        assert ir_check(s) >= -1e-9
        assert consumer_utility(0.0, 0.0, s) == 0.0

    def test_shift_breaks_ir(self, fig_params):
        s = shift_transfers(limited_schedule(fig_params), 0.1)
        assert ir_check(s) == pytest.approx(-0.1, abs=1e-12)


class TestSequentialRationality:
    @settings(max_examples=30)
    @given(st.floats(0.02, 0.98), st.floats(0.05, 3.0))
    def test_limited_passes(self, mu, c):
        assert sequential_rationality_check(limited_schedule(make(mu, c)))

    def test_commitment_above_half_fails(self, fig_params):
        res = sequential_rationality_check(commitment_schedule(fig_params))
        assert not res
        [bad] = res.offending
        assert bad["lo"] == pytest.approx(0.75)
        assert bad["hi"] == pytest.approx(1.0)
        assert bad["expected"] == 1.0

    def test_commitment_below_half_fails_on_excluded_cell(self):
        # price v_H everywhere; the excluded cell has mean 1/4 < 0.3
        res = sequential_rationality_check(commitment_schedule(make(0.3, 1.0)))
        [bad] = res.offending
        assert (bad["segment"], bad["lo"], bad["hi"]) == (0, 0.0, 0.5)
        assert bad["expected"] == pytest.approx(0.3)

    def test_wrong_pool_price(self, fig_params):
        s = limited_schedule(fig_params)
        segs = list(s.segments)
        segs[2] = segs[2].__class__(**{**segs[2].__dict__, "price2": 1.0})
        res = sequential_rationality_check(s.with_segments(segs))
        assert not res
        assert res.offending[0]["segment"] == 2


class TestBayesPlausibility:
    def test_induced(self, fig_params):
        from productline.surplus import induced_distribution
        ok, worst = bayes_plausibility_check(induced_distribution(limited_schedule(fig_params)),
                                             tol=1e-8)
        assert ok

    def test_spread_fails(self):
        assert not bayes_plausibility_check(MeanDistribution([0.0, 1.0], [0.5, 0.5]))[0]


class TestRevenue:
    @pytest.mark.parametrize("mu,c", [(0.2, 1.0), (0.35, 1.0), (0.6, 2.0), (0.75, 2.0),
                                      (0.9, 0.5)])
    def test_transfer_and_virtual_agree(self, mu, c):
        assert revenue_consistency(limited_schedule(make(mu, c))) <= 1e-9

    def test_zero_transfers_gap_is_transfer_mass(self, fig_params):
        from scipy.integrate import quad
        s = limited_schedule(fig_params)
        mass = sum(quad(lambda t, g=g: float(g.transfer(t)), g.lo, g.hi)[0] for g in s.segments)
        assert revenue_consistency(zero_transfers(s)) == pytest.approx(mass, abs=1e-9)

    def test_shift_changes_revenue_by_shift(self, fig_params):
        s = limited_schedule(fig_params)
        assert transfer_revenue(shift_transfers(s, 0.1)) - transfer_revenue(s) == pytest.approx(
            0.1, abs=1e-10)


class TestMonotonicity:
    def test_running_example(self, fig_params):
        ok, drop, where = numeric_monotonicity(limited_schedule(fig_params))
        assert not ok
        assert where == pytest.approx(0.9045085, abs=2e-4)

    def test_commitment_monotone(self, fig_params):
        # one price for everyone, so U' is q + delta_v throughout
        ok, drop, where = numeric_monotonicity(commitment_schedule(fig_params))
        assert ok and drop == 0.0 and where is None

    def test_commitment_below_half(self):
        assert numeric_monotonicity(commitment_schedule(make(0.3, 1.0)))[0]


class TestReport:
    def test_limited_low_mu(self):
        rep = verify_schedule(limited_schedule(make(0.2, 1.0)), 1001)
        assert rep.passed()
        d = rep.to_dict()
        assert {"icViolation", "irViolation", "bpOk", "seqRatOk", "revenueGap",
                "gridSizes"} <= set(d)

    def test_first_best_not_applicable(self):
        rep = verify_schedule(first_best_schedule(make(0.3, 1.0)), 1001)
        assert rep.notes

    def test_corrupted_schedule_fails(self, fig_params):
        rep = verify_schedule(shift_transfers(limited_schedule(make(0.9, 0.5)), 0.1), 1001)
        assert not rep.passed()
        assert rep.ir_violation == pytest.approx(0.1, abs=1e-12)
