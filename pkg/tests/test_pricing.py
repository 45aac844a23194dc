import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from productline import DomainError, ModelParams, TieBreak, period2_price, period2_revenue
from productline.pricing import TIE_BAND, serves_low

LOW, HIGH = TieBreak.FAVOR_LOW, TieBreak.FAVOR_HIGH


@pytest.fixture
def half():
    return ModelParams.create(0.5, 1.0, 1.0)


class TestPrice:
    def test_low_mean_sells_low(self, half):
        assert period2_price(0.2, half, HIGH) == 0.5

    def test_tie_follows_rule(self, half):
        assert period2_price(0.5, half, LOW) == 0.5
        assert period2_price(0.5, half, HIGH) == 1.0

    def test_certain_high(self, half):
        assert period2_price(1.0, half, LOW) == 1.0

    def test_tie_band(self, half):
        assert period2_price(0.5 + 0.5 * TIE_BAND, half, LOW) == 0.5
        assert period2_price(0.5 + 10 * TIE_BAND, half, LOW) == 1.0

    @pytest.mark.parametrize("m", [-0.1, 1.1, np.nan])
    def test_domain(self, half, m):
        with pytest.raises(DomainError):
            period2_price(m, half, LOW)

    @pytest.mark.parametrize("tie", [LOW, HIGH])
    def test_nondecreasing(self, tie):
        p = ModelParams.create(0.37, 1.0, 1.0)
        m = np.linspace(0, 1, 1001)
        assert np.all(np.diff(period2_price(m, p, tie)) >= 0)

    def test_array_returns_array(self, half):
        out = serves_low(np.array([0.1, 0.9]), half, LOW)
        assert out.tolist() == [True, False]


class TestRevenue:
    def test_mid_mean(self):
        p = ModelParams.create(0.75, 1.0, 2.0)
        assert period2_revenue(0.5, p, HIGH) == 0.75

    def test_zero_mean(self):
        p = ModelParams.create(0.3, 2.0, 1.0)
        assert period2_revenue(0.0, p, HIGH) == 0.3

    def test_high_mean(self):
        p = ModelParams.create(0.75, 1.0, 2.0)
        assert period2_revenue(0.9, p, LOW) == pytest.approx(0.9)

    @given(st.floats(0.05, 0.95), st.floats(0.1, 5), st.floats(0, 1))
    def test_is_max_of_branches(self, mu, vh, m):
        p = ModelParams.create(mu * vh, vh, 1.0)
        if abs(m - p.mu_bar) <= TIE_BAND:
            return
        assert period2_revenue(m, p, LOW) == pytest.approx(max(m * vh, p.v_L), rel=1e-14)

    @given(st.floats(0.05, 0.95), st.floats(0.1, 5))
    def test_indifference(self, mu, vh):
        p = ModelParams.create(mu * vh, vh, 1.0)
        a = period2_revenue(p.mu_bar, p, LOW)
        b = period2_revenue(p.mu_bar, p, HIGH)
        assert abs(a - b) <= 1e-12 * vh
