# -*- coding: utf-8 -*-
'''
    moepgg.commands.evaluate
    ~~~~~~~~~~~~~~~~~~~~~~~~

    Measure the greedy cooperation rate of a checkpointed agent pool.
'''

# Import Python libs
from __future__ import annotations
import logging
import os

# Import 3rd-party libs
import numpy as np

# Import moepgg libs
from moepgg.commands.base import BaseCommand
from moepgg.commands.train import select_conditions
from moepgg.config import build_experiment_config, experiment_echo, load_conditions
from moepgg.exceptions import ConfigError, UsageError
from moepgg.learning import load_checkpoint
from moepgg.output import write_csv
from moepgg.population import PoolAgent, evaluate

log = logging.getLogger(__name__)

COLUMNS = ('f', 'mean_cooperation', 'groups', 'rounds', 'noisy')


class EvaluateCommand(BaseCommand):

    name = 'evaluate'
    help = 'Evaluate a checkpointed agent pool'
    uses = ('config', 'f', 'sigma')
    options = (
        ('checkpoint', {
            'default': None,
            'type': 'string',
            'metavar': '<path>',
            'help': 'Checkpoint written by the train command'}),
        ('condition', {
            'default': (),
            'type': 'csv',
            'metavar': '<name>',
            'help': 'Config file condition supplying the evaluation settings'}),
        ('groups', {
            'default': None,
            'type': 'int',
            'metavar': '<groups>',
            'help': 'Groups sampled per factor'}),
        ('rounds', {
            'default': None,
            'type': 'int',
            'metavar': '<rounds>',
            'help': 'Rounds per evaluation episode'}),
        ('noise', {
            'default': None,
            'type': 'yn',
            'metavar': '<y_or_n>',
            'help': 'Apply observation noise while evaluating'}),
    )

    def experiment(self, args, n_pool):
        if not args.config:
            return build_experiment_config({'n_pool': n_pool})
        conditions = select_conditions(load_conditions(args.config), args.condition)
        if len(conditions) != 1:
            raise UsageError('Pick one condition of {0} with --condition'.format(args.config))
        config = conditions[0][1]
        if config.n_pool != n_pool:
            raise ConfigError('Checkpoint holds {0} agents but the condition has {1}'.format(
                n_pool, config.n_pool))
        return config

    def execute(self, args, out_dir):
        if not args.checkpoint:
            raise UsageError('evaluate needs --checkpoint')
        for name in ('groups', 'rounds'):
            if getattr(args, name) is not None and getattr(args, name) < 1:
                raise UsageError('--{0} must be at least 1'.format(name))
        checkpoint = load_checkpoint(args.checkpoint)
        brains, meta = checkpoint.brains, checkpoint.meta
        config = self.experiment(args, len(brains))
        sigmas = meta.get('sigmas') or [config.sigma_for(index) for index in range(len(brains))]
        if args.sigma is not None:
            sigmas = self.require('sigma', args.sigma)
            if len(sigmas) == 1:
                sigmas = sigmas * len(brains)
            elif len(sigmas) != len(brains):
                raise UsageError('--sigma takes one value or one per agent')
        agents = [PoolAgent(index, brain, float(sigma))
                  for index, (brain, sigma) in enumerate(zip(brains, sigmas))]
        fs = self.require('f', args.f) or config.eval_fs
        groups = args.groups or config.eval_groups
        rounds = args.rounds or config.eval_rounds
        noisy = config.eval_noise if args.noise is None else args.noise
        rng = np.random.default_rng(self.seed(args))
        rows = []
        for f in fs:
            rate = evaluate(agents, config, f, rng, groups=groups, rounds=rounds, noisy=noisy)
            log.info('f=%s: mean cooperation %.3f', f, rate)
            rows.append((f, rate, groups, rounds, noisy))
        write_csv(os.path.join(out_dir, 'evaluation.csv'), COLUMNS, rows)
        self.echo(out_dir, {
            'checkpoint': args.checkpoint,
            'seed': self.seed(args),
            'f': list(fs),
            'sigmas': [float(sigma) for sigma in sigmas],
            'groups': groups,
            'rounds': rounds,
            'noisy': noisy,
            'experiment': experiment_echo(config),
        })


def register(registry):
    '''
    Register the evaluate command
    '''
    registry.register_command(EvaluateCommand())
