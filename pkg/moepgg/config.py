# -*- coding: utf-8 -*-
'''
    moepgg.config
    ~~~~~~~~~~~~~

    Experiment configuration: the option schema, YAML loading and coercion
    into :class:`moepgg.population.ExperimentConfig`.

    Options are declared the same way command line options are, as
    ``(name, {'default', 'type', 'metavar', 'help'})`` tuples. Config files
    use the option names as keys (dashes and underscores are
    interchangeable) and may hold a ``conditions`` list of named override
    mappings, one experiment condition each.
'''

# Import Python libs
from __future__ import annotations
import logging
import os
from collections import OrderedDict
from dataclasses import asdict
from typing import Any, Dict, List, Mapping, Tuple

# Import 3rd-party libs
import yaml

# Import moepgg libs
from moepgg.exceptions import ConfigError
from moepgg.learning import BrainSettings
from moepgg.population import BETA_FLOOR, ExperimentConfig, HeterogeneousBeta, HomogeneousBeta

log = logging.getLogger(__name__)

OUT_DIR_ENV = 'MOEPGG_OUT_DIR'
DEFAULT_OUT_DIR = 'moepgg-out'

EXPERIMENT_OPTIONS = (
    ('n-pool', {
        'default': 20,
        'type': 'int',
        'metavar': '<agents>',
        'help': 'Number of agents in the pool'}),
    ('m-active', {
        'default': 4,
        'type': 'int',
        'metavar': '<agents>',
        'help': 'Number of agents sampled to play each episode'}),
    ('f-range', {
        'default': (0.5, 6.5),
        'type': 'floats',
        'metavar': '<min,max>',
        'help': 'Interval the multiplication factor is sampled from'}),
    ('rounds-per-episode', {
        'default': 10,
        'type': 'int',
        'metavar': '<rounds>',
        'help': 'Consecutive rounds played by a group'}),
    ('episodes', {
        'default': 20000,
        'type': 'int',
        'metavar': '<episodes>',
        'help': 'Training episodes per run'}),
    ('runs', {
        'default': 20,
        'type': 'int',
        'metavar': '<runs>',
        'help': 'Independent runs'}),
    ('coins', {
        'default': 4.0,
        'type': 'float',
        'metavar': '<coins>',
        'help': 'Endowment of every agent'}),
    ('obs-noise-sigma', {
        'default': (0.0,),
        'type': 'floats',
        'metavar': '<sigma[,sigma...]>',
        'help': 'Observation noise on f, one value for the pool or one per agent'}),
    ('beta-mode', {
        'default': 'homogeneous',
        'type': 'choice',
        'choices': ('homogeneous', 'heterogeneous'),
        'metavar': '<mode>',
        'help': 'Whether every agent shares beta or draws its own'}),
    ('beta', {
        'default': 1.0,
        'type': 'float',
        'metavar': '<beta>',
        'help': 'Shared beta of the homogeneous mode'}),
    ('beta-mean', {
        'default': 1.0,
        'type': 'float',
        'metavar': '<mean>',
        'help': 'Mean of the heterogeneous beta distribution'}),
    ('sigma-beta', {
        'default': 0.0,
        'type': 'float',
        'metavar': '<sigma>',
        'help': 'Standard deviation of the heterogeneous beta distribution'}),
    ('eval-fs', {
        'default': (0.5, 1.5, 3.5, 6.5),
        'type': 'floats',
        'metavar': '<f[,f...]>',
        'help': 'Multiplication factors used for evaluation'}),
    ('eval-interval', {
        'default': 100,
        'type': 'int',
        'metavar': '<episodes>',
        'help': 'Episodes between evaluation sweeps'}),
    ('master-seed', {
        'default': 0,
        'type': 'int',
        'metavar': '<seed>',
        'help': 'Seed every run seed is derived from'}),
    ('eval-groups', {
        'default': 25,
        'type': 'int',
        'metavar': '<groups>',
        'help': 'Groups sampled per evaluation'}),
    ('eval-rounds', {
        'default': 10,
        'type': 'int',
        'metavar': '<rounds>',
        'help': 'Rounds per evaluation episode'}),
    ('eval-noise', {
        'default': True,
        'type': 'yn',
        'metavar': '<y_or_n>',
        'help': 'Apply the training noise condition to evaluation observations'}),
    ('initial-opponent-action', {
        'default': 0.0,
        'type': 'float',
        'metavar': '<value>',
        'help': 'Opponent action feature seen in the first round'}),
    ('hidden-size', {
        'default': 8,
        'type': 'int',
        'metavar': '<units>',
        'help': 'Units per hidden layer'}),
    ('hidden-layers', {
        'default': 2,
        'type': 'int',
        'metavar': '<layers>',
        'help': 'Number of hidden layers'}),
    ('learning-rate', {
        'default': 0.001,
        'type': 'float',
        'metavar': '<lr>',
        'help': 'RMSprop learning rate'}),
    ('rms-smoothing', {
        'default': 0.99,
        'type': 'float',
        'metavar': '<alpha>',
        'help': 'RMSprop smoothing constant'}),
    ('rms-eps', {
        'default': 1e-8,
        'type': 'float',
        'metavar': '<eps>',
        'help': 'RMSprop epsilon'}),
    ('gamma', {
        'default': 0.99,
        'type': 'float',
        'metavar': '<gamma>',
        'help': 'Discount factor'}),
    ('epsilon', {
        'default': 0.1,
        'type': 'float',
        'metavar': '<epsilon>',
        'help': 'Exploration rate while training'}),
    ('buffer-capacity', {
        'default': 10000,
        'type': 'int',
        'metavar': '<transitions>',
        'help': 'Replay buffer capacity per agent'}),
    ('batch-size', {
        'default': 64,
        'type': 'int',
        'metavar': '<transitions>',
        'help': 'Minibatch size'}),
    ('target-sync-interval', {
        'default': 100,
        'type': 'int',
        'metavar': '<updates>',
        'help': 'Updates between target network syncs'}),
    ('bootstrap-selection', {
        'default': 'q',
        'type': 'choice',
        'choices': ('q', 'return'),
        'metavar': '<rule>',
        'help': 'Pick the bootstrap action from target Q values or from r + gamma * Q'}),
    ('q-scale', {
        'default': 1.0,
        'type': 'float',
        'metavar': '<scale>',
        'help': 'Value scale; the network predicts Q divided by it'}),
    ('updates-per-episode', {
        'default': 1,
        'type': 'int',
        'metavar': '<updates>',
        'help': 'Minibatch updates per active agent after each episode'}),
    ('jobs', {
        'default': 1,
        'type': 'int',
        'metavar': '<processes>',
        'help': 'Worker processes used to execute runs'}),
)

_OPTIONS = OrderedDict((name.replace('-', '_'), spec) for name, spec in EXPERIMENT_OPTIONS)
_YES = ('y', 'yes', 'true', 'on', '1')
_NO = ('n', 'no', 'false', 'off', '0')


def option_key(name: str) -> str:
    return str(name).strip().replace('-', '_')


def coerce(name: str, spec: Mapping[str, Any], value: Any) -> Any:
    '''
    Convert ``value`` to the option's declared type
    '''
    kind = spec['type']
    try:
        if kind == 'int':
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError('not an integer')
            return int(float(value))
        if kind == 'float':
            if isinstance(value, bool):
                raise ValueError('not a number')
            return float(value)
        if kind == 'string':
            return str(value)
        if kind == 'yn':
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in _YES:
                return True
            if text in _NO:
                return False
            raise ValueError('expected yes or no')
        if kind in ('csv', 'floats'):
            if isinstance(value, str):
                items = [item.strip() for item in value.split(',') if item.strip()]
            elif isinstance(value, (list, tuple)):
                items = list(value)
            else:
                items = [value]
            if kind == 'csv':
                return tuple(str(item) for item in items)
            return tuple(float(item) for item in items)
        if kind == 'choice':
            if value not in spec['choices']:
                raise ValueError('expected one of {0}'.format(', '.join(spec['choices'])))
            return value
    except (TypeError, ValueError) as exc:
        raise ConfigError('Invalid value {0} for option {1}: {2}'.format(value, name, exc))
    raise ConfigError('Option {0} has unknown type {1}'.format(name, kind))


def defaults() -> Dict[str, Any]:
    return {key: spec['default'] for key, spec in _OPTIONS.items()}


def resolve(values: Mapping[str, Any]) -> Dict[str, Any]:
    '''
    Defaults updated with the coerced ``values``; unknown keys are an error.
    '''
    resolved = defaults()
    for name, value in values.items():
        key = option_key(name)
        if key not in _OPTIONS:
            raise ConfigError('Unknown configuration option: {0}'.format(name))
        resolved[key] = coerce(name, _OPTIONS[key], value)
    return resolved


def build_experiment_config(values: Mapping[str, Any]) -> ExperimentConfig:
    resolved = resolve(values)
    if resolved['beta_mode'] == 'heterogeneous':
        beta_mode = HeterogeneousBeta(resolved['sigma_beta'], resolved['beta_mean'])
    else:
        beta_mode = HomogeneousBeta(resolved['beta'])
    sigmas = resolved['obs_noise_sigma']
    if len(sigmas) == 1:
        sigmas = sigmas[0]
    if len(resolved['f_range']) != 2:
        raise ConfigError('f_range needs exactly two values, got {0}'.format(
            resolved['f_range']))
    try:
        brain = BrainSettings(
            hidden_size=resolved['hidden_size'],
            hidden_layers=resolved['hidden_layers'],
            learning_rate=resolved['learning_rate'],
            rms_smoothing=resolved['rms_smoothing'],
            rms_eps=resolved['rms_eps'],
            gamma=resolved['gamma'],
            epsilon=resolved['epsilon'],
            buffer_capacity=resolved['buffer_capacity'],
            batch_size=resolved['batch_size'],
            target_sync_interval=resolved['target_sync_interval'],
            bootstrap_selection=resolved['bootstrap_selection'],
            q_scale=resolved['q_scale'],
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    for name in ('hidden_size', 'hidden_layers', 'buffer_capacity', 'batch_size',
                 'target_sync_interval'):
        if resolved[name] < 1:
            raise ConfigError('{0} must be at least 1, got {1}'.format(name, resolved[name]))
    if not 0 <= resolved['epsilon'] <= 1:
        raise ConfigError('epsilon must lie in [0, 1], got {0}'.format(resolved['epsilon']))
    if not 0 <= resolved['gamma'] <= 1:
        raise ConfigError('gamma must lie in [0, 1], got {0}'.format(resolved['gamma']))
    if resolved['learning_rate'] <= 0:
        raise ConfigError('learning_rate must be positive')
    return ExperimentConfig(
        n_pool=resolved['n_pool'],
        m_active=resolved['m_active'],
        f_range=resolved['f_range'],
        rounds_per_episode=resolved['rounds_per_episode'],
        episodes=resolved['episodes'],
        runs=resolved['runs'],
        coins=resolved['coins'],
        obs_noise_sigma=sigmas,
        beta_mode=beta_mode,
        eval_fs=resolved['eval_fs'],
        eval_interval=resolved['eval_interval'],
        master_seed=resolved['master_seed'],
        eval_groups=resolved['eval_groups'],
        eval_rounds=resolved['eval_rounds'],
        eval_noise=resolved['eval_noise'],
        initial_opponent_action=resolved['initial_opponent_action'],
        brain=brain,
        updates_per_episode=resolved['updates_per_episode'],
        jobs=resolved['jobs'],
    )


def experiment_echo(config: ExperimentConfig) -> Dict[str, Any]:
    '''
    JSON-ready description of every resolved experiment parameter
    '''
    echo = asdict(config)
    echo['beta_mode'] = dict(asdict(config.beta_mode), kind=(
        'heterogeneous' if isinstance(config.beta_mode, HeterogeneousBeta) else 'homogeneous'))
    echo['f_range'] = list(config.f_range)
    echo['eval_fs'] = list(config.eval_fs)
    if isinstance(config.obs_noise_sigma, tuple):
        echo['obs_noise_sigma'] = list(config.obs_noise_sigma)
    echo['decisions'] = {
        'round_one_opponent_feature': config.initial_opponent_action,
        'noise_draw': 'fresh per agent per round',
        'beta_floor': BETA_FLOOR,
        'updates': 'active agents only, {0} minibatch(es) per episode'.format(
            config.updates_per_episode),
        'evaluation': 'greedy, {0} groups, {1} rounds, noise {2}'.format(
            config.eval_groups, config.eval_rounds, 'on' if config.eval_noise else 'off'),
    }
    return echo


def load_yaml(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError('Unable to read configuration file {0}: {1}'.format(path, exc))
    except yaml.YAMLError as exc:
        raise ConfigError('Error parsing configuration file {0}: {1}'.format(path, exc))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError('Configuration file {0} must hold a mapping'.format(path))
    return data


def expand_conditions(data: Mapping[str, Any]) -> List[Tuple[str, Dict[str, Any]]]:
    '''
    ``[(name, values), ...]``: the base options merged with each entry of
    ``conditions``, or the base options alone under ``name``.
    '''
    base = dict(data)
    name = str(base.pop('name', 'default'))
    conditions = base.pop('conditions', None)
    if conditions is None:
        return [(name, base)]
    if not isinstance(conditions, list) or not conditions:
        raise ConfigError('conditions must be a non-empty list of mappings')
    expanded = []
    seen = set()
    for index, override in enumerate(conditions):
        if not isinstance(override, dict):
            raise ConfigError('Condition #{0} is not a mapping'.format(index))
        override = dict(override)
        condition_name = str(override.pop('name', 'condition_{0}'.format(index)))
        if condition_name in seen:
            raise ConfigError('Duplicate condition name: {0}'.format(condition_name))
        seen.add(condition_name)
        merged = dict(base)
        merged.update(override)
        expanded.append((condition_name, merged))
    return expanded


def load_conditions(path: str, overrides: Mapping[str, Any] = None
                    ) -> List[Tuple[str, ExperimentConfig]]:
    '''
    Every condition of the config file at ``path`` as an ExperimentConfig;
    ``overrides`` (typically command line flags) win over file values.
    '''
    conditions = []
    for name, values in expand_conditions(load_yaml(path)):
        values = dict(values)
        values.update(overrides or {})
        conditions.append((name, build_experiment_config(values)))
    log.debug('Loaded %d conditions from %s', len(conditions), path)
    return conditions


def default_out_dir() -> str:
    return os.environ.get(OUT_DIR_ENV) or DEFAULT_OUT_DIR
