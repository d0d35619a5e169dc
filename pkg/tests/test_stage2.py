import dataclasses
import math

import numpy as np
import pytest

from v2i_rrm import (
    AllInfeasibleError,
    ConvergenceError,
    DomainError,
    EffectiveSinrModel,
    InfeasibleRateError,
    Precoder,
    Vue,
    dinkelbach_allocate,
    epa_allocate,
    equalize_maxmin,
    h_value,
    latency,
    make_population,
    make_vue,
    ratio_parts,
)
from v2i_rrm.numerics import gaussian_q_inv
from v2i_rrm.stage2 import _a_coef

BANDWIDTH = 2e5
NOISE = 2e-11  # N_0 * B at the reference point
TOTAL_POWER = 20.0


@pytest.fixture
def chan(cfg):
    return cfg.channel_config()


@pytest.fixture
def population(chan):
    return make_population(chan, 10, seed=7, accuracy=0.8)


def model_for(precoder=Precoder.ZF, antennas=300, total_power=TOTAL_POWER):
    return EffectiveSinrModel(precoder, antennas, total_power, NOISE)


def oracle_h(vue, power, model, served, eta):
    """Independent h evaluation (vectorized, written from the formulas)."""
    m = float(model.antennas)
    impair = model.total_power * vue.pathloss * (1 - vue.accuracy) + m * model.noise_power
    if model.precoder is Precoder.MF:
        coef = impair / (vue.accuracy * vue.pathloss) * (m / (m - 1))
        gamma = m * power / (model.total_power - power + coef)
    else:
        coef = vue.accuracy * vue.pathloss * (m - served) / impair
        gamma = power * coef
    t = 1.0 + gamma
    f = (
        -math.sqrt(BANDWIDTH)
        * gaussian_q_inv(vue.reliability)
        * math.log2(math.e)
        * np.sqrt(1.0 - t**-2.0)
    )
    g = BANDWIDTH * np.log2(t) - vue.target_rate
    return f, g


class TestRatioParts:
    def test_consistency_with_latency(self, population):
        model = model_for()
        for k, vue in enumerate(population):
            parts = ratio_parts(model, vue, 2.0, 10, BANDWIDTH)
            lat = latency(model, vue, 2.0, 10, BANDWIDTH)
            assert parts.ratio**2 == pytest.approx(lat, rel=1e-12)
            assert parts.ratio == pytest.approx(-math.sqrt(lat), rel=1e-12)
            assert parts.numerator < 0.0
            assert parts.denominator > 0.0

    def test_half_reliability_zeroes_numerator(self):
        # the latency-penalty scale vanishes at eps = 0.5 (degenerate case,
        # excluded from the optimization but the algebra is exact)
        assert _a_coef(BANDWIDTH, 0.5) == 0.0

    def test_edge_worse_than_center(self, chan):
        model = model_for()
        edge = make_vue(chan, 1.0, 0.8, 1e5, 1e-6)
        center = make_vue(chan, 100.0, 0.8, 1e5, 1e-6)
        r_edge = ratio_parts(model, edge, 2.0, 10, BANDWIDTH).ratio
        r_center = ratio_parts(model, center, 2.0, 10, BANDWIDTH).ratio
        assert r_edge < r_center

    def test_infeasible_rate(self, chan):
        model = model_for()
        greedy = make_vue(chan, 0.0, 0.8, 1e9, 1e-6)
        with pytest.raises(InfeasibleRateError):
            ratio_parts(model, greedy, 2.0, 10, BANDWIDTH)


class TestHValue:
    def test_eta_zero_gives_numerator(self, population):
        model = model_for()
        vue = population[0]
        parts = ratio_parts(model, vue, 2.0, 10, BANDWIDTH)
        assert h_value(model, vue, 2.0, 10, BANDWIDTH, 0.0) == parts.numerator

    def test_matches_oracle(self, population):
        model = model_for(Precoder.MF)
        vue = population[3]
        f, g = oracle_h(vue, 2.0, model, 10, -0.01)
        assert h_value(model, vue, 2.0, 10, BANDWIDTH, -0.01) == pytest.approx(
            float(f - (-0.01) * g), rel=1e-12
        )

    @pytest.mark.parametrize("precoder", list(Precoder))
    def test_increasing_and_concave_in_power(self, population, precoder):
        # sampled finite differences in the operating region (SINR well above
        # the small-gamma crossover where the massive-antenna argument bends)
        model = model_for(precoder)
        vue = population[0]
        eta = -0.02
        for p in np.linspace(1.0, 5.0, 9):
            dp = 1e-3 * TOTAL_POWER
            h0 = h_value(model, vue, p - dp, 10, BANDWIDTH, eta)
            h1 = h_value(model, vue, p, 10, BANDWIDTH, eta)
            h2 = h_value(model, vue, p + dp, 10, BANDWIDTH, eta)
            assert h2 - h1 > 0.0
            assert h2 - 2.0 * h1 + h0 <= 1e-9 * max(1.0, abs(h1))


class TestEqualizer:
    def test_identical_vues_converge_immediately(self, chan):
        vues = [make_vue(chan, 80.0, 0.8, 1e5, 1e-6)] * 5
        model = model_for()
        state = equalize_maxmin(vues, model, BANDWIDTH, eta=-0.01)
        assert state.iterations == 0
        assert state.converged
        np.testing.assert_allclose(state.powers, TOTAL_POWER / 5)

    def test_spread_within_tolerance(self, population):
        model = model_for()
        state = equalize_maxmin(population, model, BANDWIDTH, eta=-0.01)
        assert state.converged
        assert state.spread <= 1e-2

    def test_power_conserved(self, population):
        model = model_for()
        state = equalize_maxmin(population, model, BANDWIDTH, eta=-0.01)
        assert abs(float(np.sum(state.powers)) - TOTAL_POWER) <= 1e-12 * TOTAL_POWER
        assert np.all(state.powers > 0.0)

    def test_k2_matches_grid_search(self, chan):
        model = model_for()
        pair = [
            make_vue(chan, 10.0, 0.8, 1e5, 1e-6),
            make_vue(chan, 95.0, 0.8, 1e5, 1e-6),
        ]
        eta = -0.01
        state = equalize_maxmin(pair, model, BANDWIDTH, eta=eta)
        # independent 1-D grid search over p_1 at 1e-5 P_B resolution
        p1 = np.arange(1, 100_000) * (TOTAL_POWER * 1e-5)
        f1, g1 = oracle_h(pair[0], p1, model, 2, eta)
        f2, g2 = oracle_h(pair[1], TOTAL_POWER - p1, model, 2, eta)
        objective = np.minimum(f1 - eta * g1, f2 - eta * g2)
        best_p1 = p1[int(np.argmax(objective))]
        assert abs(float(state.powers[0]) - best_p1) <= 1e-3 * TOTAL_POWER

    def test_trace_monotone(self, population):
        model = model_for()
        state = equalize_maxmin(
            population, model, BANDWIDTH, eta=-0.01, record_trace=True
        )
        trace = state.trace
        assert trace is not None and trace.shape[1] == 4
        spreads = trace[:, 1] - trace[:, 2]
        # spread never grows across iterations (rejected steps keep the state)
        assert np.all(np.diff(spreads) <= 1e-9)
        # step sizes only ever halve
        mus = trace[:, 3]
        assert np.all(np.diff(mus) <= 1e-15)

    def test_step_floor_degrades_gracefully(self, population):
        # an unreachable spread tolerance exhausts the halvings instead of
        # erroring, returning the best iterate with converged=False
        model = model_for()
        state = equalize_maxmin(population, model, BANDWIDTH, eta=-0.01, zeta_s=1e-13)
        assert not state.converged
        assert state.spread < 1.0

    def test_iteration_cap_raises(self, population):
        model = model_for()
        with pytest.raises(ConvergenceError):
            equalize_maxmin(
                population, model, BANDWIDTH, eta=-0.01, max_iterations=3
            )

    def test_all_infeasible(self, chan):
        vues = make_population(chan, 4, seed=2, target_rate=1e9)
        model = model_for()
        with pytest.raises(AllInfeasibleError):
            equalize_maxmin(vues, model, BANDWIDTH, eta=-0.01)

    def test_argument_validation(self, population):
        model = model_for()
        with pytest.raises(DomainError):
            equalize_maxmin(population, model, BANDWIDTH, eta=0.01)
        with pytest.raises(DomainError):
            equalize_maxmin(population, model, BANDWIDTH, eta=-0.01, zeta_s=0.0)
        with pytest.raises(DomainError):
            equalize_maxmin(
                population, model, BANDWIDTH, eta=-0.01, mu0=2 * TOTAL_POWER
            )


class TestDinkelbach:
    def test_single_vue(self, chan):
        vue = make_vue(chan, 42.0, 0.8, 1e5, 1e-6)
        model = model_for()
        alloc = dinkelbach_allocate([vue], model, BANDWIDTH)
        assert alloc.powers[0] == TOTAL_POWER
        full_latency = latency(model, vue, TOTAL_POWER, 1, BANDWIDTH)
        assert alloc.eta_star == pytest.approx(-math.sqrt(full_latency), rel=1e-12)
        assert alloc.outer_iterations == 1

    def test_trace_invariants(self, population):
        model = model_for()
        alloc = dinkelbach_allocate(population, model, BANDWIDTH)
        etas = [eta for eta, _ in alloc.trace]
        fs = [f for _, f in alloc.trace]
        assert all(b >= a for a, b in zip(etas, etas[1:]))
        assert all(f >= 0.0 for f in fs)
        assert fs[-1] <= 1e-2
        assert alloc.converged

    def test_max_latency_is_eta_squared(self, population):
        model = model_for()
        alloc = dinkelbach_allocate(population, model, BANDWIDTH)
        assert alloc.max_latency == pytest.approx(alloc.eta_star**2, rel=1e-9)
        assert float(np.max(alloc.latencies)) == alloc.max_latency

    def test_power_conservation(self, population):
        model = model_for()
        alloc = dinkelbach_allocate(population, model, BANDWIDTH)
        assert abs(float(np.sum(alloc.powers)) - TOTAL_POWER) <= 1e-12 * TOTAL_POWER

    def test_k2_matches_ratio_grid_search(self, chan):
        model = model_for()
        rng = np.random.default_rng(5)
        p1 = np.arange(1, 100_000) * (TOTAL_POWER * 1e-5)
        for _ in range(5):
            pos = rng.uniform(0.0, 200.0, 2)
            pair = [make_vue(chan, float(d), 0.8, 1e5, 1e-6) for d in pos]
            alloc = dinkelbach_allocate(pair, model, BANDWIDTH)
            f1, g1 = oracle_h(pair[0], p1, model, 2, 0.0)
            f2, g2 = oracle_h(pair[1], TOTAL_POWER - p1, model, 2, 0.0)
            r1 = np.where(g1 > 0, f1 / np.where(g1 > 0, g1, 1.0), -np.inf)
            r2 = np.where(g2 > 0, f2 / np.where(g2 > 0, g2, 1.0), -np.inf)
            best = float(np.max(np.minimum(r1, r2)))
            assert alloc.eta_star == pytest.approx(best, rel=1e-4)

    def test_auxiliary_function_brackets_root(self, population):
        # F is positive below the optimal eta and negative above it
        model = model_for()
        alloc = dinkelbach_allocate(population, model, BANDWIDTH)
        eta_star = alloc.eta_star

        def f_of(eta: float) -> float:
            state = equalize_maxmin(population, model, BANDWIDTH, eta=eta)
            return float(np.min(state.objectives))

        assert f_of(eta_star * 1.1) > 0.0  # eta more negative than the root
        assert f_of(eta_star * 0.9) < 0.0  # eta above the root

    def test_f_strictly_decreasing(self, population):
        model = model_for()

        def f_of(eta: float) -> float:
            state = equalize_maxmin(population, model, BANDWIDTH, eta=eta)
            return float(np.min(state.objectives))

        assert f_of(-0.03) > f_of(-0.015) > f_of(-0.0075)

    def test_eta0_clamped_when_too_high(self, population):
        # a configured eta0 above the achievable ratio must not break the
        # F >= 0 premise
        model = model_for()
        alloc = dinkelbach_allocate(population, model, BANDWIDTH, eta0=-1e-9)
        etas = [eta for eta, _ in alloc.trace]
        assert all(b >= a for a, b in zip(etas, etas[1:]))
        assert all(f >= 0.0 for _, f in alloc.trace)

    def test_outer_cap_raises(self, population):
        model = model_for()
        with pytest.raises(ConvergenceError):
            dinkelbach_allocate(
                population, model, BANDWIDTH, zeta_p=1e-12, max_outer=1
            )

    def test_infeasible_instance(self, chan):
        vues = make_population(chan, 4, seed=2, target_rate=1e9)
        model = model_for()
        with pytest.raises(AllInfeasibleError):
            dinkelbach_allocate(vues, model, BANDWIDTH)


class TestEpa:
    def test_equal_powers_and_latencies(self, population):
        model = model_for()
        alloc = epa_allocate(population, model, BANDWIDTH)
        np.testing.assert_allclose(alloc.powers, 2.0)
        for k, vue in enumerate(population):
            assert alloc.latencies[k] == latency(model, vue, 2.0, 10, BANDWIDTH)

    def test_single_vue_same_as_dinkelbach(self, chan):
        vue = make_vue(chan, 42.0, 0.8, 1e5, 1e-6)
        model = model_for()
        a = epa_allocate([vue], model, BANDWIDTH)
        b = dinkelbach_allocate([vue], model, BANDWIDTH)
        assert a.powers[0] == b.powers[0]
        assert a.max_latency == pytest.approx(b.max_latency, rel=1e-12)

    def test_symmetric_population_equals_dinkelbach(self, chan):
        vues = [make_vue(chan, 80.0, 0.8, 1e5, 1e-6)] * 6
        model = model_for()
        a = epa_allocate(vues, model, BANDWIDTH)
        b = dinkelbach_allocate(vues, model, BANDWIDTH)
        np.testing.assert_allclose(a.powers, b.powers)
        assert a.max_latency == pytest.approx(b.max_latency, rel=1e-12)

    @pytest.mark.parametrize("precoder", list(Precoder))
    def test_never_beats_dinkelbach(self, population, precoder):
        model = model_for(precoder)
        a = epa_allocate(population, model, BANDWIDTH)
        b = dinkelbach_allocate(population, model, BANDWIDTH)
        assert b.max_latency <= a.max_latency
