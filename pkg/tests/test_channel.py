import dataclasses
import math

import pytest

from v2i_rrm import (
    ChannelConfig,
    DomainError,
    EffectiveSinrModel,
    Precoder,
    Vue,
    asymptotic_sinr,
    effective_sinr,
    make_population,
    make_vue,
    pathloss,
    phi,
    place_vues,
    worst_case_pathloss,
)


@pytest.fixture
def chan(cfg) -> ChannelConfig:
    return cfg.channel_config()


def vue_with(chan, position=100.0, accuracy=0.8, rate=1e5, eps=1e-6) -> Vue:
    return make_vue(chan, position, accuracy, rate, eps)


class TestPathloss:
    def test_midpoint_value(self, chan):
        # theta * 20^-3.8, frozen from direct high-precision evaluation
        assert pathloss(chan, 100.0) == pytest.approx(1.1378526268913002e-8, rel=1e-12)

    def test_symmetry(self, chan):
        for d in (0.0, 13.0, 57.0, 99.0):
            assert pathloss(chan, d) == pytest.approx(
                pathloss(chan, 200.0 - d), rel=1e-14
            )

    def test_edge_equals_worst_case(self, chan):
        assert pathloss(chan, 0.0) == pytest.approx(2.3315066329873840e-11, rel=1e-12)
        assert pathloss(chan, 0.0) == worst_case_pathloss(chan)
        assert pathloss(chan, 200.0) == worst_case_pathloss(chan)

    def test_worst_case_minimizes(self, chan):
        beta_w = worst_case_pathloss(chan)
        for i in range(101):
            assert beta_w <= pathloss(chan, 200.0 * i / 100)

    def test_off_road_rejected(self, chan):
        with pytest.raises(DomainError):
            pathloss(chan, -1.0)
        with pytest.raises(DomainError):
            pathloss(chan, 200.5)

    def test_maximized_at_midpoint(self, chan):
        mid = pathloss(chan, 100.0)
        for d in (0.0, 40.0, 99.0, 101.0, 150.0):
            assert pathloss(chan, d) <= mid


class TestPlacement:
    def test_single_equispaced_is_midpoint(self, chan):
        assert place_vues(chan, 1, mode="equispaced") == [100.0]

    def test_equispaced_construction(self, chan):
        assert place_vues(chan, 4, mode="equispaced") == [25.0, 75.0, 125.0, 175.0]

    def test_uniform_random_reproducible(self, chan):
        a = place_vues(chan, 16, seed=42)
        b = place_vues(chan, 16, seed=42)
        assert a == b
        c = place_vues(chan, 16, seed=43)
        assert a != c

    def test_positions_on_road(self, chan):
        for pos in place_vues(chan, 100, seed=1):
            assert 0.0 <= pos <= 200.0

    def test_unknown_mode(self, chan):
        with pytest.raises(DomainError):
            place_vues(chan, 3, mode="clustered")


class TestPhi:
    def test_zf_perfect_csi_reduction(self, chan):
        # chi = 1 removes the estimation-error term: beta (M-K) / (M sigma^2)
        vue = vue_with(chan, accuracy=1.0)
        model = EffectiveSinrModel(Precoder.ZF, 300, 20.0, 2e-11)
        expected = vue.pathloss * (300 - 10) / (300 * 2e-11)
        assert phi(model, vue, 10) == pytest.approx(expected, rel=1e-14)

    def test_zf_reference_value(self, chan):
        # independent spreadsheet-style evaluation, frozen:
        # 0.8 * 1.138e-8 * 290 / (20 * 1.138e-8 * 0.2 + 300 * 2e-11)
        vue = Vue(
            position=100.0,
            pathloss=1.138e-8,
            accuracy=0.8,
            target_rate=1e5,
            reliability=1e-6,
        )
        model = EffectiveSinrModel(Precoder.ZF, 300, 20.0, 2e-11)
        assert phi(model, vue, 10) == pytest.approx(51.245341614906832, rel=1e-12)

    def test_mf_scales_linearly_with_antennas(self, chan):
        # phi/M approaches sigma^2/(chi beta) as M grows
        vue = vue_with(chan)
        limit = 2e-11 / (vue.accuracy * vue.pathloss)
        for m in (10**3, 10**5, 10**7):
            model = EffectiveSinrModel(Precoder.MF, m, 20.0, 2e-11)
            ratio = phi(model, vue, 10) / m
            assert ratio == pytest.approx(
                limit + 20.0 * (1 - vue.accuracy) / (vue.accuracy * m), rel=1e-2
            )
        model = EffectiveSinrModel(Precoder.MF, 10**9, 20.0, 2e-11)
        assert phi(model, vue, 10) / 1e9 == pytest.approx(limit, rel=1e-6)

    def test_zf_needs_excess_antennas(self, chan):
        vue = vue_with(chan)
        model = EffectiveSinrModel(Precoder.ZF, 10, 20.0, 2e-11)
        with pytest.raises(DomainError):
            phi(model, vue, 10)

    def test_positive(self, chan):
        vue = vue_with(chan)
        for precoder in Precoder:
            model = EffectiveSinrModel(precoder, 300, 20.0, 2e-11)
            assert phi(model, vue, 10) > 0.0


class TestEffectiveSinr:
    def test_zero_power(self, chan):
        vue = vue_with(chan)
        for precoder in Precoder:
            model = EffectiveSinrModel(precoder, 300, 20.0, 2e-11)
            assert effective_sinr(model, vue, 0.0, 10) == 0.0

    def test_zf_reference_value(self):
        # p beta (M-K) / (M sigma^2) with chi = 1, frozen
        vue = Vue(
            position=100.0,
            pathloss=1.138e-8,
            accuracy=1.0,
            target_rate=1e5,
            reliability=1e-6,
        )
        model = EffectiveSinrModel(Precoder.ZF, 300, 20.0, 2e-11)
        assert effective_sinr(model, vue, 2.0, 10) == pytest.approx(
            1100.0666666666667, rel=1e-12
        )

    def test_mf_no_interference_at_full_power(self, chan):
        vue = vue_with(chan)
        model = EffectiveSinrModel(Precoder.MF, 300, 20.0, 2e-11)
        expected = 300 * 20.0 / phi(model, vue, 1)
        assert effective_sinr(model, vue, 20.0, 1) == pytest.approx(
            expected, rel=1e-14
        )

    @pytest.mark.parametrize("precoder", list(Precoder))
    def test_monotonicities(self, chan, precoder):
        vue = vue_with(chan)
        model = EffectiveSinrModel(precoder, 300, 20.0, 2e-11)

        def gamma(p=2.0, m=300, chi=0.8, beta=None, s2=2e-11):
            v = dataclasses.replace(
                vue, accuracy=chi, pathloss=beta if beta else vue.pathloss
            )
            mdl = EffectiveSinrModel(precoder, m, 20.0, s2)
            return effective_sinr(mdl, v, p, 10)

        base = gamma()
        assert gamma(p=2.2) > base  # increasing in power
        assert gamma(m=400) > base  # increasing in antennas
        assert gamma(chi=0.9) > base  # increasing in accuracy
        assert gamma(beta=1.2 * vue.pathloss) > base  # increasing in gain
        assert gamma(s2=3e-11) < base  # decreasing in noise

    @pytest.mark.parametrize("precoder", list(Precoder))
    @pytest.mark.parametrize("chi", [1.0, 0.8])
    def test_converges_to_asymptote(self, chan, precoder, chi):
        # worst-case-geometry VUE at reference scale: gap < 1% at M = 1e5
        vue = dataclasses.replace(vue_with(chan, position=0.0), accuracy=chi)
        model = EffectiveSinrModel(precoder, 100_000, 10.0, 2e-11)
        gamma = effective_sinr(model, vue, 1.0, 10)
        limit = asymptotic_sinr(model, vue, 1.0)
        assert abs(gamma - limit) / limit < 0.01

    def test_accuracy_ordering(self, chan):
        perfect = vue_with(chan, accuracy=1.0)
        imperfect = vue_with(chan, accuracy=0.8)
        model = EffectiveSinrModel(Precoder.ZF, 300, 20.0, 2e-11)
        assert effective_sinr(model, perfect, 2.0, 10) > effective_sinr(
            model, imperfect, 2.0, 10
        )

    def test_power_range_enforced(self, chan):
        vue = vue_with(chan)
        model = EffectiveSinrModel(Precoder.ZF, 300, 20.0, 2e-11)
        with pytest.raises(DomainError):
            effective_sinr(model, vue, -0.1, 10)
        with pytest.raises(DomainError):
            effective_sinr(model, vue, 20.1, 10)


class TestValidation:
    def test_vue_invariants(self, chan):
        with pytest.raises(DomainError):
            vue_with(chan, accuracy=0.0)
        with pytest.raises(DomainError):
            vue_with(chan, accuracy=1.1)
        with pytest.raises(DomainError):
            vue_with(chan, eps=0.5)
        with pytest.raises(DomainError):
            vue_with(chan, rate=0.0)

    def test_channel_invariants(self):
        with pytest.raises(DomainError):
            ChannelConfig(
                bs_offset=20.0,
                road_length=200.0,
                gain_constant=1e-3,
                pathloss_exponent=2.0,
                noise_psd=1e-16,
                signal_psd=1e-4,
            )

    def test_model_invariants(self):
        with pytest.raises(DomainError):
            EffectiveSinrModel(Precoder.MF, 1, 20.0, 2e-11)
        with pytest.raises(DomainError):
            EffectiveSinrModel(Precoder.MF, 300, 0.0, 2e-11)

    def test_population_helper(self, chan):
        pop = make_population(chan, 10, seed=3, accuracy=0.8)
        assert len(pop) == 10
        assert all(v.accuracy == 0.8 for v in pop)
        assert all(v.pathloss == pathloss(chan, v.position) for v in pop)
