# -*- coding: utf-8 -*-
'''
    moepgg.analysis
    ~~~~~~~~~~~~~~~

    ====================================
    Equilibrium And Welfare Analysis
    ====================================

    Analytical toolkit for the two-player game with mixed strategies:

    * expected vector returns and their SER / ESR scalarisations,
    * the ESR preference condition between collective cooperation and
      collective defection,
    * best responses and the opponent cooperation threshold above which
      cooperating is the best response,
    * Nash equilibria on a strategy lattice, the Pareto coverage set,
      utilitarian welfare and the price of anarchy,
    * SER landscapes for external plotting.

    Lattice sweeps are vectorised with numpy; every equilibrium or front
    decision is a per-point comparison so the result never depends on the
    order points are visited in.
'''

# Import Python libs
from __future__ import annotations
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

# Import 3rd-party libs
import numpy as np

# Import moepgg libs
from moepgg.exceptions import GameSpecError, NoEquilibriumError
from moepgg.game import (
    GameSpec,
    RiskPreference,
    VectorReturn,
    all_profiles,
    utility,
    vector_reward,
)

log = logging.getLogger(__name__)

NE_TOLERANCE = 1e-9
THRESHOLD_TOLERANCE = 1e-6


@dataclass(frozen=True)
class JointStrategy:
    '''
    Independent cooperation probability of every player
    '''

    coop_probs: Tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.coop_probs)
        if not probs:
            raise GameSpecError('A joint strategy needs at least one player')
        for prob in probs:
            if not 0.0 <= prob <= 1.0:
                raise GameSpecError('Cooperation probability out of [0, 1]: {0}'.format(prob))
        object.__setattr__(self, 'coop_probs', probs)

    def __len__(self) -> int:
        return len(self.coop_probs)

    def __getitem__(self, player: int) -> float:
        return self.coop_probs[player]

    def replace(self, player: int, prob: float) -> 'JointStrategy':
        probs = list(self.coop_probs)
        probs[player] = prob
        return JointStrategy(tuple(probs))

    def check_for(self, spec: GameSpec) -> 'JointStrategy':
        if len(self.coop_probs) != spec.n_players:
            raise GameSpecError(
                'Strategy for {0} players used in a {1} player game'.format(
                    len(self.coop_probs), spec.n_players
                )
            )
        return self


StrategyLike = Union[JointStrategy, Sequence[float]]
PrefsLike = Union[RiskPreference, Sequence[RiskPreference]]


def as_strategy(strategy: StrategyLike) -> JointStrategy:
    if isinstance(strategy, JointStrategy):
        return strategy
    return JointStrategy(tuple(strategy))


def as_prefs(prefs: PrefsLike, n_players: int) -> Tuple[RiskPreference, ...]:
    if isinstance(prefs, RiskPreference):
        return (prefs,) * n_players
    prefs = tuple(prefs)
    if len(prefs) != n_players:
        raise GameSpecError(
            'Expected {0} risk preferences, got {1}'.format(n_players, len(prefs))
        )
    return prefs


@dataclass(frozen=True)
class SweepGrid:
    '''
    Regular lattice over [0, 1] with both endpoints, used for every player
    '''

    resolution: float = 0.01

    def __post_init__(self):
        if not 0 < self.resolution <= 0.5:
            raise GameSpecError(
                'Grid resolution must be in (0, 0.5], got {0}'.format(self.resolution)
            )
        steps = int(round(1.0 / self.resolution))
        if abs(steps * self.resolution - 1.0) > 1e-9:
            raise GameSpecError(
                'Grid resolution {0} does not divide [0, 1] evenly'.format(self.resolution)
            )

    @property
    def steps(self) -> int:
        return int(round(1.0 / self.resolution))

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.steps + 1) / self.steps

    def __len__(self) -> int:
        return self.steps + 1

    def value(self, index: int) -> float:
        return index / self.steps

    def strategies(self) -> Iterator[JointStrategy]:
        for i in range(len(self)):
            for j in range(len(self)):
                yield JointStrategy((self.value(i), self.value(j)))


@dataclass(frozen=True)
class NashResult:
    strategy: JointStrategy
    ser_values: Tuple[float, ...]
    on_pareto_front: bool
    lattice_index: Tuple[int, ...] = ()
    # SER gain of each player's continuous best response over the equilibrium strategy
    best_response_gap: Tuple[float, ...] = ()


@dataclass(frozen=True)
class NashCluster:
    '''
    Equilibria adjacent on the lattice, reported together
    '''

    members: Tuple[NashResult, ...]
    p_sum_min: float
    p_sum_max: float
    stationarity_sum: Optional[float] = None
    size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'size', len(self.members))

    @property
    def constant_sum(self) -> bool:
        return self.size > 1 and self.p_sum_max - self.p_sum_min <= 1e-9

    @property
    def representative(self) -> NashResult:
        return self.members[0]


# ----- Expected returns -----------------------------------------------------------------------

def profile_probabilities(strategy: StrategyLike):
    '''
    Yield ``(profile, probability)`` for every pure profile
    '''
    strategy = as_strategy(strategy)
    for profile in all_profiles(len(strategy)):
        prob = 1.0
        for action, coop in zip(profile.actions, strategy.coop_probs):
            prob *= coop if int(action) else 1.0 - coop
        yield profile, prob


def expected_vector_return(spec: GameSpec, strategy: StrategyLike, player: int) -> VectorReturn:
    '''
    Expected (collective, individual) payoff under independent mixed strategies
    '''
    strategy = as_strategy(strategy).check_for(spec)
    spec.check_player(player)
    contributed = sum(coins * prob for coins, prob in zip(spec.endowments, strategy.coop_probs))
    collective = spec.multiplication_factor * contributed / spec.n_players
    individual = spec.endowments[player] * (1.0 - strategy.coop_probs[player])
    return VectorReturn(collective, individual)


def enumerate_expected_vector_return(spec: GameSpec, strategy: StrategyLike,
                                     player: int) -> VectorReturn:
    '''
    Same expectation computed the slow way, over all 2^n pure profiles
    '''
    strategy = as_strategy(strategy).check_for(spec)
    total = VectorReturn(0.0, 0.0)
    for profile, prob in profile_probabilities(strategy):
        total = total.plus(vector_reward(spec, profile, player).scaled(prob))
    return total


def ser_value(spec: GameSpec, strategy: StrategyLike, player: int, pref: RiskPreference) -> float:
    '''
    Scalarised expected return: utility of the expected vector
    '''
    return utility(pref, expected_vector_return(spec, strategy, player))


def esr_value(spec: GameSpec, strategy: StrategyLike, player: int, pref: RiskPreference) -> float:
    '''
    Expected scalarised return: expectation of the utility of each outcome
    '''
    strategy = as_strategy(strategy).check_for(spec)
    spec.check_player(player)
    value = 0.0
    for profile, prob in profile_probabilities(strategy):
        if prob == 0.0:
            continue
        value += prob * utility(pref, vector_reward(spec, profile, player))
    return value


# ----- ESR preference conditions ---------------------------------------------------------------

def esr_cooperation_preferred(c: float, f: float, beta: float) -> bool:
    '''
    True when every player prefers collective cooperation over collective
    defection under ESR, ``(c * f) ** beta > c``.
    '''
    if c <= 0:
        raise GameSpecError('Endowment must be positive, got {0}'.format(c))
    return (c * f) ** beta > c


def esr_beta_threshold(c: float, f: float) -> Optional[float]:
    '''
    ``log(c) / log(c * f)``, or None where the logarithmic form is undefined
    (``c * f`` equal to 0 or 1).
    '''
    cf = c * f
    if cf <= 0 or cf == 1:
        return None
    return math.log(c) / math.log(cf)


def esr_preference_by_threshold(c: float, f: float, beta: float) -> bool:
    '''
    The two logarithmic conditions: beta below the threshold when
    ``0 < cf < 1``, above it when ``cf > 1``.
    '''
    if c <= 0:
        raise GameSpecError('Endowment must be positive, got {0}'.format(c))
    cf = c * f
    threshold = esr_beta_threshold(c, f)
    if threshold is None:
        # cf ** beta is constant here: 1 for cf == 1, 0 ** beta for cf == 0
        return (cf ** beta) > c
    if cf < 1:
        return beta < threshold
    return beta > threshold


# ----- Best responses ---------------------------------------------------------------------------

def _require_two_players(spec: GameSpec):
    if spec.n_players != 2:
        raise GameSpecError(
            'The analytical tools cover 2 player games, got {0}'.format(spec.n_players)
        )


def stationarity_sum(c: float, f: float, beta: float) -> Optional[float]:
    '''
    Combined cooperation level ``p_0 + p_1`` at which a risk averse player
    (``beta < 1``) stops gaining from cooperating more, in the symmetric two
    player game. None when ``beta >= 1`` (no interior optimum).
    '''
    if beta >= 1:
        return None
    if beta == 0 or f == 0:
        return 0.0
    return (2.0 / (f * c)) * (2.0 / (beta * f)) ** (1.0 / (beta - 1.0))


def best_response(spec: GameSpec, pref: RiskPreference, opponent_coop_prob: float,
                  player: int = 0) -> float:
    '''
    SER maximising cooperation probability of ``player`` against an
    opponent cooperating with ``opponent_coop_prob``.

    For ``0 < beta < 1`` the SER is concave in the player's own probability
    and the stationary point (clipped to [0, 1]) is returned. Otherwise the
    SER is linear or convex and the better endpoint wins; ties go to
    defection.
    '''
    _require_two_players(spec)
    spec.check_player(player)
    if not 0.0 <= opponent_coop_prob <= 1.0:
        raise GameSpecError(
            'Opponent cooperation probability out of [0, 1]: {0}'.format(opponent_coop_prob)
        )
    opponent = 1 - player
    own_coins = spec.endowments[player]
    opp_coins = spec.endowments[opponent]
    f = spec.multiplication_factor
    beta = pref.beta

    def value(prob):
        probs = [0.0, 0.0]
        probs[player] = prob
        probs[opponent] = opponent_coop_prob
        return ser_value(spec, JointStrategy(tuple(probs)), player, pref)

    if own_coins == 0:
        return 0.0

    if 0 < beta < 1 and f > 0 and pref.weight_collective > 0:
        if pref.weight_individual == 0:
            return 1.0
        base = spec.n_players * pref.weight_individual / (pref.weight_collective * beta * f)
        collective_star = base ** (1.0 / (beta - 1.0))
        prob = (spec.n_players * collective_star / f - opp_coins * opponent_coop_prob) / own_coins
        return min(1.0, max(0.0, prob))

    return 1.0 if value(1.0) > value(0.0) else 0.0


def _threshold_gap(c: float, f: float, beta: float) -> Callable[[float], float]:
    def gap(prob):
        return (f * c * (1.0 + prob) / 2.0) ** beta - (f * c * prob / 2.0) ** beta - c
    return gap


def best_response_coop_threshold(c: float, f: float, beta: float,
                                 tolerance: float = THRESHOLD_TOLERANCE) -> Optional[float]:
    '''
    Smallest opponent cooperation probability ``p*`` such that cooperating
    strictly beats defecting for every ``p > p*``.

    Returns None when no ``p <= 1`` satisfies the strict inequality.
    '''
    gap = _threshold_gap(c, f, beta)
    if gap(1.0) <= 0:
        return None
    if gap(0.0) >= 0:
        return 0.0
    low, high = 0.0, 1.0
    while high - low > tolerance:
        mid = (low + high) / 2.0
        if gap(mid) > 0:
            high = mid
        else:
            low = mid
    return high


def cooperation_weakly_preferred_at_zero(c: float, f: float, beta: float) -> bool:
    '''
    Cooperating is at least as good as defecting against a pure defector
    '''
    return _threshold_gap(c, f, beta)(0.0) >= 0


# ----- Lattice sweeps ---------------------------------------------------------------------------

def _lattice(grid: SweepGrid) -> Tuple[np.ndarray, np.ndarray]:
    values = grid.values
    return np.meshgrid(values, values, indexing='ij')


def expected_return_landscape(spec: GameSpec, grid: SweepGrid,
                              player: int) -> Tuple[np.ndarray, np.ndarray]:
    '''
    Expected collective and individual return of ``player`` at every lattice
    point; rows are player 0's cooperation probability.
    '''
    _require_two_players(spec)
    spec.check_player(player)
    coop0, coop1 = _lattice(grid)
    contributed = spec.endowments[0] * coop0 + spec.endowments[1] * coop1
    collective = spec.multiplication_factor * contributed / spec.n_players
    own = coop0 if player == 0 else coop1
    individual = spec.endowments[player] * (1.0 - own)
    return collective, individual


def ser_landscape(spec: GameSpec, prefs: PrefsLike, grid: SweepGrid, player: int) -> np.ndarray:
    '''
    SER value of ``player`` at every lattice point. Rows: player 0's
    cooperation probability, columns: player 1's.
    '''
    pref = as_prefs(prefs, spec.n_players)[player]
    collective, individual = expected_return_landscape(spec, grid, player)
    return (pref.weight_collective * np.power(collective, pref.beta)
            + pref.weight_individual * individual)


def welfare_landscape(spec: GameSpec, prefs: PrefsLike, grid: SweepGrid) -> np.ndarray:
    prefs = as_prefs(prefs, spec.n_players)
    return ser_landscape(spec, prefs, grid, 0) + ser_landscape(spec, prefs, grid, 1)


def _front_mask(spec: GameSpec, grid: SweepGrid, player: int) -> np.ndarray:
    '''
    Non-dominated lattice points of ``player``'s (collective, individual)
    expected payoff.

    Dominance is decided on lattice units so that points with the same
    combined contribution compare exactly equal on the collective objective.
    '''
    _require_two_players(spec)
    spec.check_player(player)
    steps = np.arange(len(grid), dtype=float)
    units0, units1 = np.meshgrid(steps, steps, indexing='ij')
    if spec.multiplication_factor > 0:
        collective = spec.endowments[0] * units0 + spec.endowments[1] * units1
    else:
        collective = np.zeros_like(units0)
    own = units0 if player == 0 else units1
    individual = spec.endowments[player] * (grid.steps - own)

    flat_c = collective.ravel()
    flat_i = individual.ravel()
    order = np.lexsort((-flat_i, -flat_c))
    mask = np.zeros(flat_c.shape, dtype=bool)
    best_individual = -np.inf
    start = 0
    while start < len(order):
        stop = start
        level = flat_c[order[start]]
        while stop < len(order) and flat_c[order[stop]] == level:
            stop += 1
        group = order[start:stop]
        group_best = flat_i[group[0]]
        if group_best > best_individual:
            mask[group[flat_i[group] == group_best]] = True
            best_individual = group_best
        start = stop
    return mask.reshape(collective.shape)


def pareto_coverage_set(spec: GameSpec, grid: SweepGrid = SweepGrid(),
                        player: Optional[int] = None) -> List[JointStrategy]:
    '''
    Lattice joint strategies whose expected payoff vector is not Pareto
    dominated for ``player``. With ``player=None`` the union of both
    players' fronts is returned, in lattice order.
    '''
    if player is None:
        mask = _front_mask(spec, grid, 0) | _front_mask(spec, grid, 1)
    else:
        mask = _front_mask(spec, grid, player)
    return [JointStrategy((grid.value(i), grid.value(j))) for i, j in np.argwhere(mask)]


def _continuous_check(spec, prefs, grid, strategy, tolerance):
    gaps = []
    passed = True
    for player in range(2):
        own = strategy[player]
        opponent = strategy[1 - player]
        response = best_response(spec, prefs[player], opponent, player)
        gap = (ser_value(spec, strategy.replace(player, response), player, prefs[player])
               - ser_value(spec, strategy, player, prefs[player]))
        gaps.append(gap)
        if abs(response - own) > grid.resolution + 1e-12 and gap > tolerance:
            passed = False
    return passed, tuple(gaps)


def find_nash_equilibria(spec: GameSpec, prefs: PrefsLike, grid: SweepGrid = SweepGrid(),
                         tolerance: float = NE_TOLERANCE) -> List[NashResult]:
    '''
    Every lattice joint strategy at which no player can raise its SER by
    more than ``tolerance`` through a unilateral lattice deviation, and
    whose continuous best responses lie within one lattice step (or gain no
    more than ``tolerance``).

    An empty list is a valid answer.
    '''
    _require_two_players(spec)
    prefs = as_prefs(prefs, 2)
    ser0 = ser_landscape(spec, prefs, grid, 0)
    ser1 = ser_landscape(spec, prefs, grid, 1)
    stable0 = ser0.max(axis=0)[np.newaxis, :] - ser0 <= tolerance
    stable1 = ser1.max(axis=1)[:, np.newaxis] - ser1 <= tolerance
    front = _front_mask(spec, grid, 0) & _front_mask(spec, grid, 1)

    results = []
    for i, j in np.argwhere(stable0 & stable1):
        strategy = JointStrategy((grid.value(i), grid.value(j)))
        passed, gaps = _continuous_check(spec, prefs, grid, strategy, tolerance)
        if not passed:
            log.debug('Discarding lattice equilibrium %s: continuous best response too far',
                      strategy.coop_probs)
            continue
        results.append(NashResult(
            strategy=strategy,
            ser_values=tuple(
                ser_value(spec, strategy, player, prefs[player]) for player in range(2)
            ),
            on_pareto_front=bool(front[i, j]),
            lattice_index=(int(i), int(j)),
            best_response_gap=gaps,
        ))
    log.debug('f=%s betas=%s: %d equilibria', spec.multiplication_factor,
              [pref.beta for pref in prefs], len(results))
    return results


def cluster_equilibria(results: Sequence[NashResult], grid: SweepGrid = SweepGrid(),
                       spec: Optional[GameSpec] = None,
                       prefs: Optional[PrefsLike] = None) -> List[NashCluster]:
    '''
    Group equilibria that touch on the lattice (8-neighbourhood).

    A risk averse player pair produces a whole segment of equilibria with the
    same combined cooperation level; clustering reports the segment once
    instead of presenting lattice artifacts as distinct equilibria. When
    ``spec`` and symmetric ``prefs`` are given the derived stationarity sum
    is attached.
    '''
    by_index = {}
    for result in results:
        index = result.lattice_index or tuple(
            int(round(prob * grid.steps)) for prob in result.strategy.coop_probs
        )
        by_index[index] = result

    s_star = None
    if spec is not None and prefs is not None:
        prefs = as_prefs(prefs, 2)
        if prefs[0] == prefs[1] and spec.endowments[0] == spec.endowments[1]:
            s_star = stationarity_sum(spec.endowments[0], spec.multiplication_factor,
                                      prefs[0].beta)

    seen = set()
    clusters = []
    for start in sorted(by_index):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        members = []
        while queue:
            current = queue.popleft()
            members.append(current)
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    neighbour = (current[0] + di, current[1] + dj)
                    if neighbour in by_index and neighbour not in seen:
                        seen.add(neighbour)
                        queue.append(neighbour)
        members.sort()
        sums = [sum(by_index[index].strategy.coop_probs) for index in members]
        clusters.append(NashCluster(
            members=tuple(by_index[index] for index in members),
            p_sum_min=min(sums),
            p_sum_max=max(sums),
            stationarity_sum=s_star,
        ))
    return clusters


# ----- Welfare --------------------------------------------------------------------------------

def welfare(spec: GameSpec, strategy: StrategyLike, prefs: PrefsLike) -> float:
    '''
    Utilitarian welfare: the sum of every player's SER value
    '''
    strategy = as_strategy(strategy).check_for(spec)
    prefs = as_prefs(prefs, spec.n_players)
    return sum(
        ser_value(spec, strategy, player, prefs[player]) for player in range(spec.n_players)
    )


def social_optimum(spec: GameSpec, prefs: PrefsLike,
                   grid: SweepGrid = SweepGrid()) -> Tuple[JointStrategy, float]:
    '''
    Welfare maximising lattice strategy (first in lattice order on ties)
    '''
    landscape = welfare_landscape(spec, prefs, grid)
    i, j = np.unravel_index(int(np.argmax(landscape)), landscape.shape)
    strategy = JointStrategy((grid.value(i), grid.value(j)))
    return strategy, welfare(spec, strategy, prefs)


def price_of_anarchy(spec: GameSpec, prefs: PrefsLike, grid: SweepGrid = SweepGrid(),
                     equilibria: Optional[Sequence[NashResult]] = None) -> float:
    '''
    Best lattice welfare over the welfare of the worst equilibrium.

    Raises NoEquilibriumError when the lattice holds no equilibrium, which
    usually means the grid is too coarse.
    '''
    prefs = as_prefs(prefs, 2)
    if equilibria is None:
        equilibria = find_nash_equilibria(spec, prefs, grid)
    if not equilibria:
        raise NoEquilibriumError(
            'No Nash equilibrium at resolution {0} for f={1}, betas={2}'.format(
                grid.resolution, spec.multiplication_factor, [pref.beta for pref in prefs]
            )
        )
    worst = min(welfare(spec, result.strategy, prefs) for result in equilibria)
    _, best = social_optimum(spec, prefs, grid)
    best = max(best, worst)
    if worst <= 0:
        log.warning('Worst equilibrium welfare is %s; price of anarchy is unbounded', worst)
        return math.inf
    return best / worst
