import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from productline import (
    CapTooSmallError,
    ConsistencyError,
    DomainError,
    MeanDistribution,
    ModelParams,
    NonPositiveError,
    OrderingError,
    Schedule,
    ValidationError,
    check_schedule,
    commitment_schedule,
    limited_schedule,
    validate,
)
from productline.model import Prior, QualityRule, TransferRule

from conftest import make


class TestValidate:
    def test_running_example(self):
        p = validate(ModelParams(0.75, 1.0, 2.0))
        assert p.mu_bar == 0.75
        assert p.delta_v == 0.25

    def test_equal_valuations_rejected(self):
        with pytest.raises(OrderingError):
            validate(ModelParams(1.0, 1.0, 1.0))

    def test_negative_cost_rejected(self):
        with pytest.raises(NonPositiveError):
            validate(ModelParams(0.3, 1.0, -1.0))

    @pytest.mark.parametrize("vl", [0.0, -0.2])
    def test_nonpositive_low_value(self, vl):
        with pytest.raises(NonPositiveError):
            ModelParams.create(vl, 1.0, 1.0)

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            ModelParams.create(float("nan"), 1.0, 1.0)

    def test_quality_cap(self):
        ModelParams.create(0.3, 1.0, 2.0, quality_cap=0.5)
        with pytest.raises(CapTooSmallError):
            ModelParams.create(0.3, 1.0, 2.0, quality_cap=0.49)

    @given(st.floats(0.01, 10), st.floats(0.01, 0.99), st.floats(0.01, 10))
    def test_derived_identities(self, vh, mu, c):
        p = ModelParams.create(mu * vh, vh, c)
        assert p.mu_bar * p.v_H == pytest.approx(p.v_L, rel=1e-15)
        assert p.delta_v + p.v_L == pytest.approx(p.v_H, rel=1e-15)
        assert 0 < p.mu_bar < 1


class TestPrior:
    def test_call_value_matches_quadrature(self):
        from scipy.integrate import quad
        for t in (0.0, 0.3, 0.5, 0.9):
            expect, _ = quad(lambda x: max(x - t, 0.0), 0, 1, points=[t])
            assert Prior.call_value(t) == pytest.approx(expect, abs=1e-12)


class TestMeanDistribution:
    def test_point_mass_at_half(self):
        G = MeanDistribution([0.5], [1.0])
        assert G.mean == 0.5

    def test_bad_mean(self):
        with pytest.raises(ValidationError):
            MeanDistribution([0.6], [1.0])

    def test_negative_weight(self):
        with pytest.raises(ValidationError):
            MeanDistribution([0.0, 0.5, 1.0], [0.6, -0.1, 0.5])

    def test_support_outside(self):
        with pytest.raises(DomainError):
            MeanDistribution([-0.5, 1.5], [0.5, 0.5])

    def test_clusters(self):
        G = MeanDistribution([0.3, 0.3001, 0.7, 0.6999], [0.25, 0.25, 0.25, 0.25])
        cl = G.clusters(gap=0.01)
        assert len(cl) == 2
        assert cl[0][1] == pytest.approx(0.5)


class TestSchedule:
    @pytest.mark.parametrize("mu,c", [(0.2, 1), (0.35, 1), (0.6, 2), (0.75, 2), (0.9, 0.5)])
    def test_limited_schedules_pass_checker(self, mu, c):
        check_schedule(limited_schedule(make(mu, c)))

    def test_commitment_passes_checker(self, fig_params):
        check_schedule(commitment_schedule(fig_params))

    def test_json_round_trip(self, fig_params):
        s = limited_schedule(fig_params)
        back = Schedule.from_json(s.to_json())
        assert back == s
        doc = json.loads(s.to_json())
        assert set(doc) >= {"regime", "params", "segments"}
        assert set(doc["params"]) == {"vL", "vH", "c"}
        seg = doc["segments"][2]
        assert set(seg) == {"lo", "hi", "kind", "quality", "transfer", "price2", "cellMean"}
        assert seg["quality"] == {"type": "const", "value": 0.25}

    def test_full_precision_numbers(self, fig_params):
        doc = json.loads(limited_schedule(fig_params).to_json())
        assert doc["segments"][2]["lo"] == 0.5954915028125263

    def test_checker_catches_gap(self, fig_params):
        s = limited_schedule(fig_params)
        segs = list(s.segments)
        segs[1] = segs[1].__class__(**{**segs[1].__dict__, "hi": segs[1].hi - 0.01})
        with pytest.raises(ConsistencyError):
            check_schedule(s.with_segments(segs))

    def test_checker_catches_wrong_cell_mean(self, fig_params):
        s = limited_schedule(fig_params)
        segs = list(s.segments)
        segs[2] = segs[2].__class__(**{**segs[2].__dict__, "cell_mean": 0.7})
        with pytest.raises(ConsistencyError):
            check_schedule(s.with_segments(segs))

    def test_locate_half_open(self, fig_params):
        s = commitment_schedule(fig_params)
        assert list(s.locate([0.0, 0.4999, 0.5, 1.0])) == [0, 0, 1, 1]


class TestRules:
    def test_affine_quality(self):
        q = QualityRule.separating(2.0)
        assert q(0.75) == pytest.approx(0.25)
        assert not q.is_const

    def test_transfer_round_trip(self):
        t = TransferRule(-0.125, 0.0, 0.5)
        assert TransferRule.from_json(t.to_json()) == t
        assert TransferRule.from_json(0.3) == TransferRule.const(0.3)
        assert math.isclose(float(t(0.75)), 0.5 * 0.5625 - 0.125)

    def test_vectorised(self):
        q = QualityRule.const(0.2)
        assert np.all(q(np.linspace(0, 1, 5)) == 0.2)
