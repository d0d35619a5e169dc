import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from v2i_rrm import (
    DomainError,
    EffectiveSinrModel,
    InfeasibleRateError,
    Precoder,
    QosTarget,
    Vue,
    dispersion,
    effective_rate,
    effective_sinr,
    latency,
    latency_from_sinr,
    make_vue,
    na_rate,
)
from v2i_rrm.fbl import LOG2_E

LOG2E_SQ = LOG2_E * LOG2_E


class TestDispersion:
    def test_zero(self):
        assert dispersion(0.0) == 0.0

    def test_limit(self):
        assert dispersion(1e12) == pytest.approx(2.0813689810056078, rel=1e-10)

    def test_unit_sinr(self):
        assert dispersion(1.0) == pytest.approx(1.5610267357542058, rel=1e-13)

    def test_monotone_and_bounded(self):
        gammas = [10.0**e for e in range(-6, 7)]
        values = [dispersion(g) for g in gammas]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert all(v < LOG2E_SQ for v in values)

    def test_vectorized(self):
        out = dispersion(np.array([0.0, 1.0]))
        assert out.shape == (2,)
        assert out[0] == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            dispersion(-0.5)


class TestNaRate:
    def test_half_reliability_is_ergodic(self):
        # Q^{-1}(0.5) = 0 removes the penalty exactly
        g, b = 37.0, 2e5
        assert na_rate(g, 1e-3, 0.5, b) == b * math.log2(1.0 + g)

    def test_long_latency_approaches_ergodic(self):
        g, b = 37.0, 2e5
        ergodic = b * math.log2(1.0 + g)
        assert na_rate(g, 1e6, 1e-6, b) == pytest.approx(ergodic, rel=1e-6)

    def test_reference_value(self):
        # frozen from a 40-digit evaluation
        assert na_rate(1100.0, 1e-3, 1e-6, 2e5) == pytest.approx(
            1923936.6778389365, rel=1e-12
        )

    def test_negative_region_exists(self):
        # ultra-high reliability at very short blocklength is unachievable
        assert na_rate(5.0, 1e-7, 1e-9, 5e4) < 0.0

    def test_penalty_nonnegative_below_half(self):
        for g in (0.5, 10.0, 1e4):
            assert na_rate(g, 1e-3, 1e-6, 2e5) <= 2e5 * math.log2(1.0 + g)

    def test_vectorized_matches_scalar(self):
        gams = np.array([1.0, 10.0, 100.0])
        vec = na_rate(gams, 1e-3, 1e-6, 2e5)
        for g, v in zip(gams, vec):
            assert v == na_rate(float(g), 1e-3, 1e-6, 2e5)


class TestLatency:
    def test_reference_value(self):
        assert latency_from_sinr(1100.0, 1e5, 1e-6, 2e5) == pytest.approx(
            2.5490211387674844e-6, rel=1e-12
        )

    def test_round_trip_reference(self):
        lat = latency_from_sinr(1100.0, 1e5, 1e-6, 2e5)
        assert na_rate(1100.0, lat, 1e-6, 2e5) == pytest.approx(1e5, rel=1e-9)

    def test_higher_reliability_higher_latency(self):
        strict = latency_from_sinr(1100.0, 1e5, 1e-9, 2e5)
        loose = latency_from_sinr(1100.0, 1e5, 1e-6, 2e5)
        assert strict > loose

    def test_boundary_rate_infeasible(self):
        b, g = 2e5, 10.0
        with pytest.raises(InfeasibleRateError):
            latency_from_sinr(g, b * math.log2(1.0 + g), 1e-6, b)

    def test_rate_above_capacity_infeasible(self):
        with pytest.raises(InfeasibleRateError):
            latency_from_sinr(1.0, 1e9, 1e-6, 2e5)

    @given(
        gamma=st.floats(min_value=1.0, max_value=1e4),
        frac=st.floats(min_value=0.05, max_value=0.95),
        eps_exp=st.floats(min_value=-9.0, max_value=-2.0),
        bandwidth=st.floats(min_value=5e4, max_value=5e5),
    )
    @settings(max_examples=300)
    def test_round_trip_property(self, gamma, frac, eps_exp, bandwidth):
        eps = 10.0**eps_exp
        rate = frac * bandwidth * math.log2(1.0 + gamma)
        lat = latency_from_sinr(gamma, rate, eps, bandwidth)
        assert lat > 0.0
        assert na_rate(gamma, lat, eps, bandwidth) == pytest.approx(rate, rel=1e-9)


class TestModelLevelOps:
    @pytest.fixture
    def setup(self, cfg):
        chan = cfg.channel_config()
        vue = make_vue(chan, 60.0, 0.8, 1e5, 1e-6)
        model = EffectiveSinrModel(Precoder.ZF, 300, 20.0, 2e-11)
        return model, vue

    def test_effective_rate_equals_na_rate_at_gamma(self, setup):
        model, vue = setup
        gamma = effective_sinr(model, vue, 2.0, 10)
        assert effective_rate(model, vue, 2.0, 10, 1e-3, 2e5) == na_rate(
            gamma, 1e-3, vue.reliability, 2e5
        )

    def test_half_reliability_reduces_to_ergodic(self, setup):
        model, vue = setup
        gamma = effective_sinr(model, vue, 2.0, 10)
        rate = na_rate(gamma, 1e-3, 0.5, 2e5)
        assert rate == 2e5 * math.log2(1.0 + gamma)

    def test_latency_round_trip(self, setup):
        model, vue = setup
        lat = latency(model, vue, 2.0, 10, 2e5)
        assert effective_rate(model, vue, 2.0, 10, lat, 2e5) == pytest.approx(
            vue.target_rate, rel=1e-9
        )

    def test_latency_decreasing_in_power_and_antennas(self, setup):
        model, vue = setup
        base = latency(model, vue, 2.0, 10, 2e5)
        assert latency(model, vue, 2.5, 10, 2e5) < base
        import dataclasses

        bigger = dataclasses.replace(model, antennas=400)
        assert latency(bigger, vue, 2.0, 10, 2e5) < base


class TestQosTarget:
    def test_valid(self):
        QosTarget(rate=1e5, reliability=1e-6, bandwidth=2e5)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"rate": 0.0, "reliability": 1e-6, "bandwidth": 2e5},
            {"rate": 1e5, "reliability": 0.5, "bandwidth": 2e5},
            {"rate": 1e5, "reliability": 0.0, "bandwidth": 2e5},
            {"rate": 1e5, "reliability": 1e-6, "bandwidth": 0.0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            QosTarget(**kwargs)
