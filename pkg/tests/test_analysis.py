# -*- coding: utf-8 -*-

# Import Python libs
import itertools
import math

# Import 3rd-party libs
import numpy as np
import pytest

# Import moepgg libs
from moepgg.analysis import (
    JointStrategy,
    SweepGrid,
    best_response,
    best_response_coop_threshold,
    cluster_equilibria,
    cooperation_weakly_preferred_at_zero,
    enumerate_expected_vector_return,
    esr_beta_threshold,
    esr_cooperation_preferred,
    esr_preference_by_threshold,
    esr_value,
    expected_vector_return,
    find_nash_equilibria,
    pareto_coverage_set,
    price_of_anarchy,
    ser_landscape,
    ser_value,
    social_optimum,
    stationarity_sum,
    welfare,
    welfare_landscape,
)
from moepgg.exceptions import GameSpecError, NoEquilibriumError
from moepgg.game import GameSpec, RiskPreference

# Opponent cooperation thresholds for c=4; 1.0 marks an unattainable cell.
THRESHOLD_TABLE = {
    0.5: (1.0, 1.0, 1.0, 0.6, 0.4, 0.3, 0.2),
    1.0: (1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    1.5: (1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    2.5: (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
}
TABLE_BETAS = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
SWEEP_FS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


def _strategies(coop):
    return {tuple(result.strategy.coop_probs) for result in coop}


@pytest.mark.parametrize('f,probs,expected', [
    (0.5, (1, 1), (2, 0)),
    (1.5, (0.5, 0.5), (3, 2)),
    (2.5, (0, 1), (5, 4)),
])
def test_expected_vector_return(two_player, f, probs, expected):
    assert expected_vector_return(two_player(f), probs, 0) == pytest.approx(expected)


def test_expected_vector_return_matches_enumeration(rng):
    for n_players in (2, 3, 4):
        for _ in range(20):
            spec = GameSpec(n_players, tuple(rng.uniform(0, 6, size=n_players)),
                            rng.uniform(0, 7))
            strategy = JointStrategy(tuple(rng.uniform(0, 1, size=n_players)))
            for player in range(n_players):
                closed = expected_vector_return(spec, strategy, player)
                brute = enumerate_expected_vector_return(spec, strategy, player)
                np.testing.assert_allclose(closed, brute, rtol=1e-12, atol=1e-12)


def test_strategy_validation(two_player):
    with pytest.raises(GameSpecError):
        JointStrategy((0.5, 1.5))
    with pytest.raises(GameSpecError):
        expected_vector_return(two_player(1.5), (0.5, 0.5, 0.5), 0)


@pytest.mark.parametrize('f,probs,beta,player,expected', [
    (0.5, (1, 1), 3, 0, 8.0),
    (1.7, (0, 0), 0.5, 0, 4.0),
    (1.7, (0, 0), 2.5, 1, 4.0),
    (1.0, (1, 0), 2, 1, 8.0),
])
def test_ser_value(two_player, f, probs, beta, player, expected):
    assert ser_value(two_player(f), probs, player, RiskPreference(beta)) == pytest.approx(expected)


def test_esr_value(two_player):
    spec = two_player(0.5)
    assert esr_value(spec, (0.5, 0.5), 0, RiskPreference(2)) == pytest.approx(3.5)
    for beta in (0.5, 1, 3):
        assert esr_value(spec, (0, 0), 0, RiskPreference(beta)) == pytest.approx(4.0)


def test_esr_differs_from_ser_for_nonlinear_utility(two_player):
    spec = two_player(0.5)
    pref = RiskPreference(2)
    assert ser_value(spec, (0.5, 0.5), 0, pref) == pytest.approx(3.0)
    assert esr_value(spec, (0.5, 0.5), 0, pref) == pytest.approx(3.5)
    linear = RiskPreference(1)
    assert ser_value(spec, (0.3, 0.8), 0, linear) == pytest.approx(
        esr_value(spec, (0.3, 0.8), 0, linear))


@pytest.mark.parametrize('c,f,beta,expected', [
    (4, 0.5, 3, True),
    (4, 0.5, 1, False),
    (4, 2.5, 1, True),
])
def test_esr_cooperation_preferred(c, f, beta, expected):
    assert esr_cooperation_preferred(c, f, beta) is expected


def test_esr_cooperation_preferred_random_triples():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        c = rng.uniform(0.5, 8.0)
        f = rng.uniform(0.01, 7.0)
        beta = rng.uniform(0.05, 6.0)
        direct = (c * f) ** beta > c
        assert esr_cooperation_preferred(c, f, beta) is direct
        assert esr_preference_by_threshold(c, f, beta) is direct


def test_esr_threshold_edges():
    assert esr_beta_threshold(4, 0.25) is None
    assert esr_beta_threshold(4, 0) is None
    assert esr_beta_threshold(4, 1) == pytest.approx(math.log(4) / math.log(4))
    assert esr_preference_by_threshold(4, 0.25, 3) is False
    assert esr_cooperation_preferred(1, 0, 0) is False
    with pytest.raises(GameSpecError):
        esr_cooperation_preferred(0, 1, 1)


@pytest.mark.parametrize('f', sorted(THRESHOLD_TABLE))
def test_threshold_table_truncated(f):
    for beta, expected in zip(TABLE_BETAS, THRESHOLD_TABLE[f]):
        threshold = best_response_coop_threshold(4, f, beta)
        value = 1.0 if threshold is None else math.floor(threshold * 10 + 1e-9) / 10
        assert value == expected, (f, beta, threshold)


@pytest.mark.parametrize('f', sorted(THRESHOLD_TABLE))
def test_threshold_table_within_tolerance(f):
    for beta, expected in zip(TABLE_BETAS, THRESHOLD_TABLE[f]):
        if (f, beta) == (0.5, 6.0):
            # the published cell is truncated from 0.26
            continue
        threshold = best_response_coop_threshold(4, f, beta)
        value = 1.0 if threshold is None else threshold
        assert value == pytest.approx(expected, abs=0.05), (f, beta, threshold)


def test_threshold_examples():
    assert best_response_coop_threshold(4, 0.5, 3) == pytest.approx((math.sqrt(5) - 1) / 2,
                                                                    abs=1e-5)
    assert best_response_coop_threshold(4, 0.5, 2) is None
    assert best_response_coop_threshold(4, 1.5, 2) == 0.0
    assert best_response_coop_threshold(4, 0.5, 4) == pytest.approx(0.4, abs=0.05)
    assert best_response_coop_threshold(4, 0.5, 6) == pytest.approx(0.26, abs=0.005)


def test_threshold_is_strict():
    threshold = best_response_coop_threshold(4, 0.5, 3)
    spec = GameSpec.symmetric(2, 4, 0.5)
    pref = RiskPreference(3)
    above = min(1.0, threshold + 1e-3)
    below = threshold - 1e-3
    assert ser_value(spec, (1, above), 0, pref) > ser_value(spec, (0, above), 0, pref)
    assert ser_value(spec, (1, below), 0, pref) < ser_value(spec, (0, below), 0, pref)


@pytest.mark.parametrize('f', sorted(THRESHOLD_TABLE))
@pytest.mark.parametrize('beta', TABLE_BETAS)
def test_threshold_agrees_with_best_response(two_player, f, beta):
    spec = two_player(f)
    pref = RiskPreference(beta)
    threshold = best_response_coop_threshold(4, f, beta)
    if threshold is None:
        for opponent in (0.0, 0.5, 1.0):
            assert best_response(spec, pref, opponent) < 1.0
        return
    assert best_response(spec, pref, min(1.0, threshold + 0.01)) == 1.0
    if threshold >= 0.01:
        assert best_response(spec, pref, threshold - 0.01) == 0.0


def test_weak_convention_at_zero():
    # f=1, beta=2: cooperating ties with defecting against a defector
    assert cooperation_weakly_preferred_at_zero(4, 1.0, 2) is True
    assert best_response_coop_threshold(4, 1.0, 2) == 0.0
    assert cooperation_weakly_preferred_at_zero(4, 0.5, 3) is False


@pytest.mark.parametrize('f,beta,opp,expected', [
    (2.5, 1.5, 1.0, 1.0),
    (0.5, 1.0, 0.0, 0.0),
    (0.5, 1.0, 0.7, 0.0),
    (0.5, 1.0, 1.0, 0.0),
    (0.5, 0.5, 0.0, 0.015625),
])
def test_best_response(two_player, f, beta, opp, expected):
    response = best_response(two_player(f), RiskPreference(beta), opp)
    assert response == pytest.approx(expected, abs=1e-9)


def test_best_response_interior_is_optimal(two_player):
    spec = two_player(3.0)
    pref = RiskPreference(0.5)
    response = best_response(spec, pref, 0.02)
    best = ser_value(spec, (response, 0.02), 0, pref)
    for prob in np.linspace(0, 1, 201):
        assert ser_value(spec, (prob, 0.02), 0, pref) <= best + 1e-12


def test_best_response_for_second_player(two_player):
    spec = two_player(2.5)
    assert best_response(spec, RiskPreference(1.5), 0.0, player=1) == 1.0
    with pytest.raises(GameSpecError):
        best_response(spec, RiskPreference(1.5), 1.5)


def test_stationarity_sum():
    assert stationarity_sum(4, 0.5, 0.5) == pytest.approx(0.015625)
    assert stationarity_sum(4, 2.0, 1.0) is None
    assert stationarity_sum(4, 2.0, 0.0) == 0.0


def test_sweep_grid():
    grid = SweepGrid(0.5)
    assert len(grid) == 3
    np.testing.assert_allclose(grid.values, [0.0, 0.5, 1.0])
    assert len(list(grid.strategies())) == 9
    for resolution in (0.0, 0.3, 0.7):
        with pytest.raises(GameSpecError):
            SweepGrid(resolution)


def test_nash_cooperative_risk_seeking(two_player):
    found = _strategies(find_nash_equilibria(two_player(2.5), RiskPreference(1.5)))
    assert (1.0, 1.0) in found
    assert (0.0, 0.0) not in found


def test_nash_mixed_motive_risk_neutral(two_player):
    found = _strategies(find_nash_equilibria(two_player(1.5), RiskPreference(1.0)))
    assert (0.0, 0.0) in found


def test_nash_risk_averse_segment(two_player):
    results = find_nash_equilibria(two_player(0.5), RiskPreference(0.5))
    assert results
    for result in results:
        assert sum(result.strategy.coop_probs) == pytest.approx(0.02)
        assert result.on_pareto_front is False


@pytest.mark.parametrize('f', SWEEP_FS)
@pytest.mark.parametrize('beta', (0.3, 0.5))
def test_nash_risk_averse_near_stationarity_sum(two_player, f, beta):
    s_star = stationarity_sum(4, f, beta)
    results = find_nash_equilibria(two_player(f), RiskPreference(beta))
    assert results
    for result in results:
        assert abs(sum(result.strategy.coop_probs) - s_star) <= 0.02
        assert max(result.strategy.coop_probs) < 0.1


@pytest.mark.parametrize('f', SWEEP_FS)
@pytest.mark.parametrize('beta', (0.3, 0.5, 0.8))
def test_nash_continuous_best_response_contract(two_player, f, beta):
    spec = two_player(f)
    pref = RiskPreference(beta)
    grid = SweepGrid()
    for result in find_nash_equilibria(spec, pref, grid):
        for player in range(2):
            own = result.strategy.coop_probs[player]
            opponent = result.strategy.coop_probs[1 - player]
            response = best_response(spec, pref, opponent, player)
            gap = result.best_response_gap[player]
            assert abs(response - own) <= grid.resolution + 1e-12 or gap <= 1e-9
            # off-lattice gains stay small but can exceed the lattice tolerance
            assert -1e-12 <= gap < 0.005


@pytest.mark.parametrize('f', (2.5, 3.0))
@pytest.mark.parametrize('beta', (1.5, 2.0, 3.0))
def test_nash_unique_mutual_cooperation(two_player, f, beta):
    found = _strategies(find_nash_equilibria(two_player(f), RiskPreference(beta)))
    assert found == {(1.0, 1.0)}


def test_nash_coexistence(two_player):
    found = _strategies(find_nash_equilibria(two_player(1.5), RiskPreference(1.2)))
    assert (0.0, 0.0) in found
    assert (1.0, 1.0) in found


def test_nash_brute_force_coarse_grid(two_player):
    grid = SweepGrid(0.5)
    for f, beta in itertools.product((0.5, 1.5, 2.5), (0.5, 1.0, 2.0, 3.0)):
        spec = two_player(f)
        pref = RiskPreference(beta)
        found = find_nash_equilibria(spec, pref, grid)
        for result in found:
            p0, p1 = result.strategy.coop_probs
            for deviation in grid.values:
                assert ser_value(spec, (deviation, p1), 0, pref) <= result.ser_values[0] + 1e-9
                assert ser_value(spec, (p0, deviation), 1, pref) <= result.ser_values[1] + 1e-9


def test_nash_results_on_pareto_front(two_player):
    results = find_nash_equilibria(two_player(2.5), RiskPreference(2.0))
    assert [result.on_pareto_front for result in results] == [True]


def test_cluster_equilibria(two_player):
    spec = two_player(0.5)
    pref = RiskPreference(0.5)
    grid = SweepGrid()
    clusters = cluster_equilibria(find_nash_equilibria(spec, pref, grid), grid, spec, pref)
    assert len(clusters) == 1
    cluster = clusters[0]
    assert cluster.size == 3
    assert cluster.constant_sum
    assert cluster.stationarity_sum == pytest.approx(0.015625)


def test_cluster_equilibria_separates_distant_points(two_player):
    grid = SweepGrid()
    results = find_nash_equilibria(two_player(1.5), RiskPreference(1.2), grid)
    clusters = cluster_equilibria(results, grid)
    assert len(clusters) == len(results)
    assert all(cluster.size == 1 for cluster in clusters)


def _exhaustive_front(spec, grid, player):
    points = list(grid.strategies())
    payoffs = [expected_vector_return(spec, point, player) for point in points]
    front = set()
    for point, payoff in zip(points, payoffs):
        dominated = any(
            other[0] >= payoff[0] and other[1] >= payoff[1] and tuple(other) != tuple(payoff)
            for other in payoffs
        )
        if not dominated:
            front.add(point.coop_probs)
    return front


@pytest.mark.parametrize('f', (0.0, 0.5, 1.5, 2.5))
def test_pareto_coverage_set_matches_exhaustive_dominance(two_player, f):
    spec = two_player(f)
    grid = SweepGrid(0.5)
    union = set()
    for player in range(2):
        expected = _exhaustive_front(spec, grid, player)
        found = {strategy.coop_probs for strategy in pareto_coverage_set(spec, grid, player)}
        assert found == expected
        union |= expected
    assert {strategy.coop_probs for strategy in pareto_coverage_set(spec, grid)} == union


def test_pareto_coverage_set_shape(two_player):
    front = {s.coop_probs for s in pareto_coverage_set(two_player(1.5), SweepGrid(0.1), 0)}
    assert front == {(k / 10, 1.0) for k in range(11)}
    zero = {s.coop_probs for s in pareto_coverage_set(two_player(0.0), SweepGrid(0.1), 0)}
    assert all(p0 == 0.0 for p0, _ in zero)
    assert len(zero) == 11


@pytest.mark.parametrize('f,beta,probs,expected', [
    (1.0, 2, (1, 1), 32.0),
    (1.3, 0.7, (0, 0), 8.0),
    (2.5, 1, (1, 1), 20.0),
])
def test_welfare(two_player, f, beta, probs, expected):
    assert welfare(two_player(f), probs, RiskPreference(beta)) == pytest.approx(expected)


def test_social_optimum(two_player):
    strategy, value = social_optimum(two_player(2.5), RiskPreference(1))
    assert strategy.coop_probs == (1.0, 1.0)
    assert value == pytest.approx(20.0)


def test_landscapes(two_player):
    spec = two_player(0.5)
    pref = RiskPreference(0.5)
    grid = SweepGrid(0.1)
    ser0 = ser_landscape(spec, pref, grid, 0)
    assert ser0.shape == (11, 11)
    assert ser0[10, 10] == pytest.approx(math.sqrt(2))
    assert ser0[0, 0] == pytest.approx(4.0)
    ser1 = ser_landscape(spec, pref, grid, 1)
    np.testing.assert_allclose(ser1, ser0.T)
    np.testing.assert_allclose(welfare_landscape(spec, pref, grid), ser0 + ser1)
    assert ser0[3, 7] == pytest.approx(ser_value(spec, (0.3, 0.7), 0, pref))


@pytest.mark.parametrize('f,beta,expected,tolerance', [
    (2.5, 1.5, 1.0, 0.01),
    (1.0, 2.0, 4.0, 0.05),
    (0.5, 3.0, 2.0, 0.01),
])
def test_price_of_anarchy(two_player, f, beta, expected, tolerance):
    poa = price_of_anarchy(two_player(f), RiskPreference(beta))
    assert poa == pytest.approx(expected, abs=tolerance)


def test_price_of_anarchy_against_welfare_enumeration(two_player):
    spec = two_player(1.0)
    pref = RiskPreference(2.0)
    grid = SweepGrid(0.05)
    best = max(welfare(spec, point, pref) for point in grid.strategies())
    worst = min(welfare(spec, r.strategy, pref) for r in find_nash_equilibria(spec, pref, grid))
    assert best == pytest.approx(32.0)
    assert worst == pytest.approx(8.0)
    assert price_of_anarchy(spec, pref, grid) == pytest.approx(best / worst)


@pytest.mark.parametrize('f', SWEEP_FS)
def test_price_of_anarchy_risk_averse(two_player, f):
    assert 1.0 <= price_of_anarchy(two_player(f), RiskPreference(0.3)) <= 1.05


@pytest.mark.parametrize('f', (1.0, 1.5, 2.0, 2.5, 3.0))
def test_price_of_anarchy_risk_seeking(two_player, f):
    assert price_of_anarchy(two_player(f), RiskPreference(3.0)) == pytest.approx(1.0, abs=0.01)


def test_price_of_anarchy_elevated_for_small_factor(two_player):
    assert price_of_anarchy(two_player(0.5), RiskPreference(2.5)) > 1.2
    assert price_of_anarchy(two_player(0.5), RiskPreference(2.5)) == pytest.approx(
        math.sqrt(2), abs=0.01)


@pytest.mark.parametrize('f,beta', [(0.5, 3.0), (1.0, 2.0), (1.5, 1.2)])
def test_price_of_anarchy_high_somewhere(two_player, f, beta):
    assert price_of_anarchy(two_player(f), RiskPreference(beta)) > 1.5


def test_price_of_anarchy_without_equilibria(two_player):
    with pytest.raises(NoEquilibriumError):
        price_of_anarchy(two_player(1.5), RiskPreference(1.0), equilibria=[])


def test_analysis_rejects_larger_games():
    spec = GameSpec.symmetric(3, 4, 1.5)
    with pytest.raises(GameSpecError):
        find_nash_equilibria(spec, (RiskPreference(1),) * 2)
    with pytest.raises(GameSpecError):
        best_response(spec, RiskPreference(1), 0.5)
