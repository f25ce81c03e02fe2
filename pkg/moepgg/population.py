# -*- coding: utf-8 -*-
'''
    moepgg.population
    ~~~~~~~~~~~~~~~~~

    ======================
    Population Experiments
    ======================

    A pool of learners repeatedly plays sampled MO-EPGG instances in small
    active groups. Each agent only sees a noisy reading of the
    multiplication factor and its opponents' previous actions; payoffs always
    use the true factor. Cooperation of greedy policies is measured at fixed
    factors every ``eval_interval`` episodes.

    Runs are independent: every run draws its seeds from the master seed
    through ``numpy.random.SeedSequence`` so they can be executed in any
    order or in parallel worker processes.
'''

# Import Python libs
from __future__ import annotations
import logging
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

# Import 3rd-party libs
import numpy as np

# Import moepgg libs
from moepgg.exceptions import ConfigError
from moepgg.game import ActionProfile, GameSpec, RiskPreference, vector_reward
from moepgg.learning import (
    OBSERVATION_SIZE,
    AgentBrain,
    BrainSettings,
    Transition,
    save_checkpoint,
)

log = logging.getLogger(__name__)

BETA_FLOOR = 0.01


@dataclass(frozen=True)
class HomogeneousBeta:
    beta: float = 1.0

    def describe(self) -> str:
        return 'homogeneous(beta={0})'.format(self.beta)


@dataclass(frozen=True)
class HeterogeneousBeta:
    sigma_beta: float
    mean: float = 1.0

    def describe(self) -> str:
        return 'heterogeneous(mean={0}, sigma_beta={1})'.format(self.mean, self.sigma_beta)


BetaMode = Union[HomogeneousBeta, HeterogeneousBeta]


@dataclass(frozen=True)
class ExperimentConfig:
    '''
    Everything one experiment condition needs.

    ``obs_noise_sigma`` is either one sigma shared by the pool or one value
    per pool agent.
    '''

    n_pool: int = 20
    m_active: int = 4
    f_range: Tuple[float, float] = (0.5, 6.5)
    rounds_per_episode: int = 10
    episodes: int = 20000
    runs: int = 20
    coins: float = 4.0
    obs_noise_sigma: Union[float, Tuple[float, ...]] = 0.0
    beta_mode: BetaMode = field(default_factory=HomogeneousBeta)
    eval_fs: Tuple[float, ...] = (0.5, 1.5, 3.5, 6.5)
    eval_interval: int = 100
    master_seed: int = 0
    eval_groups: int = 25
    eval_rounds: int = 10
    eval_noise: bool = True
    initial_opponent_action: float = 0.0
    brain: BrainSettings = field(default_factory=BrainSettings)
    # minibatch steps in each active agent's end of episode update pass
    updates_per_episode: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.m_active < 2:
            raise ConfigError('m_active must be at least 2, got {0}'.format(self.m_active))
        if self.m_active > self.n_pool:
            raise ConfigError('m_active ({0}) exceeds n_pool ({1})'.format(
                self.m_active, self.n_pool))
        if self.m_active != OBSERVATION_SIZE:
            # one observed f plus the other members' previous actions
            raise ConfigError('m_active must be {0} to match the observation size, got {1}'.format(
                OBSERVATION_SIZE, self.m_active))
        low, high = self.f_range
        if not 0 <= low < high:
            raise ConfigError('f_range must satisfy 0 <= min < max, got {0}'.format(
                self.f_range))
        for name in ('rounds_per_episode', 'runs', 'eval_interval', 'eval_groups',
                     'eval_rounds', 'updates_per_episode', 'jobs'):
            if getattr(self, name) < 1:
                raise ConfigError('{0} must be at least 1, got {1}'.format(
                    name, getattr(self, name)))
        if self.episodes < 0:
            raise ConfigError('episodes must be non-negative, got {0}'.format(self.episodes))
        if self.coins < 0:
            raise ConfigError('coins must be non-negative, got {0}'.format(self.coins))
        if isinstance(self.obs_noise_sigma, (tuple, list)):
            sigmas = tuple(float(sigma) for sigma in self.obs_noise_sigma)
            if len(sigmas) != self.n_pool:
                raise ConfigError('Expected {0} per-agent noise sigmas, got {1}'.format(
                    self.n_pool, len(sigmas)))
            object.__setattr__(self, 'obs_noise_sigma', sigmas)
        else:
            sigmas = (float(self.obs_noise_sigma),)
        if any(sigma < 0 for sigma in sigmas):
            raise ConfigError('Noise sigma must be non-negative')
        if any(f < 0 for f in self.eval_fs):
            raise ConfigError('Evaluation factors must be non-negative')
        if isinstance(self.beta_mode, HomogeneousBeta) and self.beta_mode.beta <= 0:
            raise ConfigError('Learning agents need beta > 0')
        if isinstance(self.beta_mode, HeterogeneousBeta) and self.beta_mode.sigma_beta < 0:
            raise ConfigError('sigma_beta must be non-negative')
        object.__setattr__(self, 'f_range', (float(low), float(high)))
        object.__setattr__(self, 'eval_fs', tuple(float(f) for f in self.eval_fs))

    def sigma_for(self, agent_index: int) -> float:
        if isinstance(self.obs_noise_sigma, tuple):
            return self.obs_noise_sigma[agent_index]
        return float(self.obs_noise_sigma)


@dataclass(frozen=True)
class Observation:
    f_observed: float
    opponent_prev_actions: Tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array((self.f_observed,) + tuple(self.opponent_prev_actions), dtype=float)


class EvalRecord(NamedTuple):
    run: int
    episode: int
    f: float
    mean_cooperation: float


@dataclass
class PoolAgent:
    index: int
    brain: AgentBrain
    sigma: float = 0.0

    @property
    def beta(self) -> float:
        return self.brain.pref.beta


@dataclass
class EpisodeResult:
    '''
    ``actions`` has one row per round and one column per group member;
    ``transitions[k]`` belongs to the k-th member.
    '''

    actions: np.ndarray
    rewards: np.ndarray
    transitions: List[List[Transition]]

    @property
    def cooperation_rate(self) -> float:
        return float(self.actions.mean())


class RunResult(NamedTuple):
    run: int
    records: List[EvalRecord]
    agents: List[PoolAgent]
    checkpoint: Optional[str]


def sample_game(config: ExperimentConfig, rng: np.random.Generator) -> GameSpec:
    low, high = config.f_range
    return GameSpec.symmetric(config.m_active, config.coins, rng.uniform(low, high))


def sample_active(config: ExperimentConfig, rng: np.random.Generator) -> Tuple[int, ...]:
    picks = rng.choice(config.n_pool, size=config.m_active, replace=False)
    return tuple(int(index) for index in picks)


def observe(f: float, sigma: float, prev_actions: Sequence[float],
            rng: np.random.Generator) -> Observation:
    '''
    Noisy reading of ``f``; negative readings are clamped to 0. A draw is
    taken even when ``sigma`` is 0 so the random stream does not depend on
    the noise condition.
    '''
    reading = f + float(rng.normal(0.0, sigma))
    return Observation(max(0.0, reading), tuple(float(action) for action in prev_actions))


def _opponents(values: Sequence[float], player: int) -> Tuple[float, ...]:
    return tuple(value for index, value in enumerate(values) if index != player)


def run_episode(agents: Sequence[PoolAgent], spec: GameSpec, config: ExperimentConfig,
                rng: np.random.Generator, explore: bool = True,
                rounds: Optional[int] = None, noisy: bool = True) -> EpisodeResult:
    '''
    Play ``rounds`` consecutive rounds of ``spec`` with the given group.

    The first round sees ``initial_opponent_action`` in place of previous
    actions. The terminal round's next observation reuses the last reading
    of ``f`` and carries no new draw.
    '''
    if len(agents) != spec.n_players:
        raise ConfigError('Group of {0} agents cannot play a {1}-player game'.format(
            len(agents), spec.n_players))
    rounds = rounds or config.rounds_per_episode
    sigmas = [agent.sigma if noisy else 0.0 for agent in agents]
    previous = [config.initial_opponent_action] * len(agents)
    observations = [observe(spec.f, sigma, _opponents(previous, player), rng)
                    for player, sigma in enumerate(sigmas)]
    actions = np.zeros((rounds, len(agents)), dtype=int)
    rewards = np.zeros((rounds, len(agents), 2))
    transitions = [[] for _ in agents]
    for round_index in range(rounds):
        chosen = [agent.brain.select_action(observation.as_array(), explore, rng)
                  for agent, observation in zip(agents, observations)]
        profile = ActionProfile(tuple(chosen))
        terminal = round_index == rounds - 1
        indicators = [float(action) for action in chosen]
        if terminal:
            next_observations = [
                Observation(observation.f_observed, _opponents(indicators, player))
                for player, observation in enumerate(observations)
            ]
        else:
            next_observations = [observe(spec.f, sigma, _opponents(indicators, player), rng)
                                 for player, sigma in enumerate(sigmas)]
        for player in range(len(agents)):
            reward = vector_reward(spec, profile, player)
            actions[round_index, player] = int(chosen[player])
            rewards[round_index, player] = reward
            transitions[player].append(Transition(
                observations[player].as_array(), chosen[player], reward,
                next_observations[player].as_array(), terminal))
        observations = next_observations
    return EpisodeResult(actions, rewards, transitions)


def draw_betas(config: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    '''
    Raw Normal draws of the heterogeneous beta mode, before clamping
    '''
    mode = config.beta_mode
    if not isinstance(mode, HeterogeneousBeta):
        raise ConfigError('Beta draws need a heterogeneous beta mode')
    return rng.normal(mode.mean, mode.sigma_beta, size=config.n_pool)


def sample_betas(config: ExperimentConfig, rng: np.random.Generator) -> List[RiskPreference]:
    if isinstance(config.beta_mode, HomogeneousBeta):
        return [RiskPreference(config.beta_mode.beta)] * config.n_pool
    betas = np.maximum(draw_betas(config, rng), BETA_FLOOR)
    return [RiskPreference(float(beta)) for beta in betas]


def evaluate(agents: Sequence[PoolAgent], config: ExperimentConfig, f: float,
             rng: np.random.Generator, groups: Optional[int] = None,
             rounds: Optional[int] = None, noisy: Optional[bool] = None) -> float:
    '''
    Mean fraction of cooperative actions of greedy policies over sampled
    groups playing at multiplication factor ``f``.
    '''
    groups = groups or config.eval_groups
    rounds = rounds or config.eval_rounds
    noisy = config.eval_noise if noisy is None else noisy
    spec = GameSpec.symmetric(config.m_active, config.coins, f)
    cooperated = 0
    total = 0
    for _ in range(groups):
        group = [agents[index] for index in sample_active(config, rng)]
        result = run_episode(group, spec, config, rng, explore=False, rounds=rounds,
                             noisy=noisy)
        cooperated += int(result.actions.sum())
        total += result.actions.size
    return cooperated / total


def build_agents(config: ExperimentConfig, rng: np.random.Generator) -> List[PoolAgent]:
    prefs = sample_betas(config, rng)
    return [PoolAgent(index, AgentBrain(pref, rng, config.brain), config.sigma_for(index))
            for index, pref in enumerate(prefs)]


def run_seeds(config: ExperimentConfig) -> List[np.random.SeedSequence]:
    return np.random.SeedSequence(config.master_seed).spawn(config.runs)


def run_experiment(config: ExperimentConfig, run: int, seed: np.random.SeedSequence,
                   checkpoint_dir: Optional[str] = None) -> RunResult:
    '''
    One independent run: build the pool, train it and evaluate it on
    schedule. The evaluation stream is separate from the training stream.
    '''
    init_seed, train_seed, eval_seed = seed.spawn(3)
    init_rng = np.random.default_rng(init_seed)
    rng = np.random.default_rng(train_seed)
    eval_rng = np.random.default_rng(eval_seed)
    agents = build_agents(config, init_rng)
    log.info('Run %d: %d episodes, %s', run, config.episodes, config.beta_mode.describe())
    records = []
    for episode in range(config.episodes):
        spec = sample_game(config, rng)
        group = [agents[index] for index in sample_active(config, rng)]
        result = run_episode(group, spec, config, rng)
        for agent, transitions in zip(group, result.transitions):
            agent.brain.remember(transitions)
            for _ in range(config.updates_per_episode):
                agent.brain.train_step(rng)
        if (episode + 1) % config.eval_interval == 0:
            for f in config.eval_fs:
                rate = evaluate(agents, config, f, eval_rng)
                records.append(EvalRecord(run, episode + 1, f, rate))
            log.debug('Run %d episode %d: %s', run, episode + 1,
                      ', '.join('f={0}: {1:.3f}'.format(record.f, record.mean_cooperation)
                                for record in records[-len(config.eval_fs):]))
    checkpoint = None
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)
        checkpoint = os.path.join(checkpoint_dir, 'run_{0}.npz'.format(run))
        save_checkpoint(checkpoint, [agent.brain for agent in agents], rng,
                        meta={'run': run, 'episode': config.episodes,
                              'sigmas': [agent.sigma for agent in agents]},
                        eval_rng=eval_rng)
    log.info('Run %d finished', run)
    return RunResult(run, records, agents, checkpoint)


def _run_job(args) -> RunResult:
    return run_experiment(*args)


def train(config: ExperimentConfig, checkpoint_dir: Optional[str] = None) -> List[RunResult]:
    '''
    Every run of ``config``, ordered by run index. With ``jobs > 1`` the
    runs execute in worker processes; results do not depend on ``jobs``.
    '''
    jobs = [(config, run, seed, checkpoint_dir) for run, seed in enumerate(run_seeds(config))]
    if config.jobs == 1 or len(jobs) == 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=config.jobs) as executor:
        return list(executor.map(_run_job, jobs))


def eval_records(results: Sequence[RunResult]) -> List[EvalRecord]:
    return [record for result in results for record in result.records]


def final_cooperation(records: Sequence[EvalRecord], last_k: int = 1) -> Dict[float, float]:
    '''
    Per evaluation factor, the mean over runs of each run's last ``last_k``
    evaluations.
    '''
    per_run = defaultdict(list)
    for record in sorted(records, key=lambda record: record.episode):
        per_run[(record.f, record.run)].append(record.mean_cooperation)
    per_f = defaultdict(list)
    for (f, _), rates in per_run.items():
        per_f[f].append(float(np.mean(rates[-last_k:])))
    return {f: float(np.mean(rates)) for f, rates in sorted(per_f.items())}
