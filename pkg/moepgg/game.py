# -*- coding: utf-8 -*-
'''
    moepgg.game
    ~~~~~~~~~~~

    ===============================
    Multi-Objective EPGG Mechanics
    ===============================

    Payoffs of the extended public goods game, split into a collective
    component (the player's share of the multiplied pool) and an individual
    component (the endowment the player kept), plus the risk-preference
    utility that scalarises such a vector.

    Every other module calls into this one; nothing here keeps state.
'''

# Import Python libs
from __future__ import annotations
import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Sequence, Tuple, Union

# Import moepgg libs
from moepgg.exceptions import GameSpecError, PlayerIndexError, UtilityDomainError


class Action(enum.IntEnum):
    '''
    Player action. The integer value is the cooperation indicator I(a).
    '''

    DEFECT = 0
    COOPERATE = 1

    @property
    def symbol(self) -> str:
        return 'C' if self is Action.COOPERATE else 'D'

    @classmethod
    def from_symbol(cls, symbol: str) -> 'Action':
        try:
            return {'C': cls.COOPERATE, 'D': cls.DEFECT}[symbol.upper()]
        except KeyError:
            raise GameSpecError('Unknown action symbol: {0}'.format(symbol))


class GameClass(enum.Enum):
    COMPETITIVE = 'competitive'
    MIXED_MOTIVE = 'mixed-motive'
    COOPERATIVE = 'cooperative'


@dataclass(frozen=True)
class GameSpec:
    '''
    One game instance: player count, per-player endowments and the
    multiplication factor ``f``.
    '''

    n_players: int
    endowments: Tuple[float, ...]
    multiplication_factor: float

    def __post_init__(self):
        if int(self.n_players) != self.n_players or self.n_players < 2:
            raise GameSpecError(
                'A game needs at least 2 players, got {0}'.format(self.n_players)
            )
        endowments = tuple(float(coins) for coins in self.endowments)
        if len(endowments) != self.n_players:
            raise GameSpecError(
                'Expected {0} endowments, got {1}'.format(self.n_players, len(endowments))
            )
        if any(coins < 0 for coins in endowments):
            raise GameSpecError('Endowments must be non-negative: {0}'.format(endowments))
        if self.multiplication_factor < 0:
            raise GameSpecError(
                'The multiplication factor must be non-negative, got {0}'.format(
                    self.multiplication_factor
                )
            )
        object.__setattr__(self, 'n_players', int(self.n_players))
        object.__setattr__(self, 'endowments', endowments)
        object.__setattr__(self, 'multiplication_factor', float(self.multiplication_factor))

    @classmethod
    def symmetric(cls, n_players: int, coins: float, multiplication_factor: float) -> 'GameSpec':
        '''
        All players hold the same endowment
        '''
        return cls(n_players, (coins,) * int(n_players), multiplication_factor)

    @property
    def f(self) -> float:
        return self.multiplication_factor

    def check_player(self, player: int) -> int:
        if not 0 <= player < self.n_players:
            raise PlayerIndexError(
                'Player index {0} out of range for {1} players'.format(player, self.n_players)
            )
        return player


@dataclass(frozen=True)
class ActionProfile:
    actions: Tuple[Action, ...]

    def __post_init__(self):
        object.__setattr__(self, 'actions', tuple(Action(action) for action in self.actions))

    @classmethod
    def parse(cls, notation: str) -> 'ActionProfile':
        '''
        Build a profile from compact notation, ``'CD'`` meaning player 0
        cooperates and player 1 defects.
        '''
        return cls(tuple(Action.from_symbol(symbol) for symbol in notation.strip()))

    def __len__(self) -> int:
        return len(self.actions)

    def __str__(self) -> str:
        return ''.join(action.symbol for action in self.actions)

    @property
    def cooperators(self) -> int:
        return sum(int(action) for action in self.actions)

    def check_for(self, spec: GameSpec) -> 'ActionProfile':
        if len(self.actions) != spec.n_players:
            raise GameSpecError(
                'Profile {0} has {1} actions but the game has {2} players'.format(
                    self, len(self.actions), spec.n_players
                )
            )
        return self


ProfileLike = Union[ActionProfile, Sequence[Action], str]


def as_profile(profile: ProfileLike) -> ActionProfile:
    if isinstance(profile, ActionProfile):
        return profile
    if isinstance(profile, str):
        return ActionProfile.parse(profile)
    return ActionProfile(tuple(profile))


class VectorReturn(NamedTuple):
    '''
    Two-objective payoff or return: (collective, individual) coins.
    '''

    collective: float
    individual: float

    def plus(self, other: 'VectorReturn') -> 'VectorReturn':
        return VectorReturn(self.collective + other.collective, self.individual + other.individual)

    def scaled(self, factor: float) -> 'VectorReturn':
        return VectorReturn(self.collective * factor, self.individual * factor)


@dataclass(frozen=True)
class RiskPreference:
    '''
    Utility parameters of one agent.

    ``beta`` is the exponent applied to the collective component: below 1
    the agent is risk averse, above 1 risk seeking. The weights default to 1.
    '''

    beta: float
    weight_collective: float = 1.0
    weight_individual: float = 1.0

    def __post_init__(self):
        if self.beta < 0:
            raise GameSpecError('beta must be non-negative, got {0}'.format(self.beta))
        if self.weight_collective < 0 or self.weight_individual < 0:
            raise GameSpecError('Utility weights must be non-negative')
        object.__setattr__(self, 'beta', float(self.beta))
        object.__setattr__(self, 'weight_collective', float(self.weight_collective))
        object.__setattr__(self, 'weight_individual', float(self.weight_individual))

    @property
    def risk_attitude(self) -> str:
        if self.beta < 1:
            return 'averse'
        if self.beta > 1:
            return 'seeking'
        return 'neutral'


def vector_reward(spec: GameSpec, profile: ProfileLike, player: int) -> VectorReturn:
    '''
    Collective and individual payoff of ``player`` under a pure profile.

    The pool is the sum of contributed endowments, multiplied by ``f`` and
    shared evenly; the individual part is the endowment a defector kept.
    '''
    profile = as_profile(profile).check_for(spec)
    spec.check_player(player)
    pool = sum(coins * int(action) for coins, action in zip(spec.endowments, profile.actions))
    collective = pool * spec.multiplication_factor / spec.n_players
    individual = spec.endowments[player] * (1 - int(profile.actions[player]))
    return VectorReturn(float(collective), float(individual))


def scalar_reward(spec: GameSpec, profile: ProfileLike, player: int) -> float:
    '''
    Single-objective EPGG reward; the sum of both vector components.
    '''
    reward = vector_reward(spec, profile, player)
    return reward.collective + reward.individual


def utility(pref: RiskPreference, g: Tuple[float, float]) -> float:
    '''
    Scalarised utility ``w_C * g_C ** beta + w_I * g_I``.

    ``0 ** 0`` is 1. A negative collective component is only accepted for
    integral exponents.
    '''
    collective, individual = g
    if collective < 0 and not float(pref.beta).is_integer():
        raise UtilityDomainError(
            'Negative collective return {0} with fractional beta {1}'.format(
                collective, pref.beta
            )
        )
    return (pref.weight_collective * float(collective) ** pref.beta
            + pref.weight_individual * float(individual))


def classify_game(spec: GameSpec) -> GameClass:
    '''
    Incentive alignment of the game. ``f == 1`` counts as competitive and
    ``f == n`` as mixed-motive.
    '''
    if spec.multiplication_factor <= 1:
        return GameClass.COMPETITIVE
    if spec.multiplication_factor <= spec.n_players:
        return GameClass.MIXED_MOTIVE
    return GameClass.COOPERATIVE


def all_profiles(n_players: int) -> Iterator[ActionProfile]:
    '''
    Every pure profile, cooperation first: CC, CD, DC, DD for two players.
    '''
    for actions in itertools.product((Action.COOPERATE, Action.DEFECT), repeat=n_players):
        yield ActionProfile(actions)


def payoff_table(spec: GameSpec) -> List[Tuple[ActionProfile, Tuple[VectorReturn, ...]]]:
    '''
    Vector rewards of every player for every pure profile
    '''
    table = []
    for profile in all_profiles(spec.n_players):
        rewards = tuple(vector_reward(spec, profile, player) for player in range(spec.n_players))
        table.append((profile, rewards))
    return table
