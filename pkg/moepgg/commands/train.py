# -*- coding: utf-8 -*-
'''
    moepgg.commands.train
    ~~~~~~~~~~~~~~~~~~~~~

    Train agent pools for every condition of a configuration file.

    Each condition gets its own directory holding ``eval_curve.csv``,
    ``summary.csv``, ``config_echo.json`` and one checkpoint per run.
'''

# Import Python libs
from __future__ import annotations
import logging
import os

# Import moepgg libs
from moepgg.commands.base import BaseCommand
from moepgg.config import experiment_echo, load_conditions
from moepgg.exceptions import UsageError
from moepgg.output import write_csv, write_config_echo
from moepgg.population import eval_records, final_cooperation, train

log = logging.getLogger(__name__)

CURVE_COLUMNS = ('run', 'episode', 'f', 'mean_cooperation')
SUMMARY_COLUMNS = ('f', 'final_mean_cooperation', 'runs', 'last_k')


def config_overrides(args):
    '''
    Experiment options set on the command line
    '''
    overrides = {}
    if args.seed is not None:
        overrides['master_seed'] = args.seed
    for name in ('episodes', 'runs', 'jobs'):
        if getattr(args, name) is not None:
            overrides[name] = getattr(args, name)
    if args.sigma is not None:
        if not args.sigma:
            raise UsageError('--sigma needs at least one value')
        overrides['obs_noise_sigma'] = args.sigma
    if args.beta is not None:
        if len(args.beta) != 1:
            raise UsageError('--beta takes a single value when training')
        overrides['beta_mode'] = 'homogeneous'
        overrides['beta'] = args.beta[0]
    return overrides


def select_conditions(conditions, names):
    if not names:
        return conditions
    known = [name for name, _ in conditions]
    missing = [name for name in names if name not in known]
    if missing:
        raise UsageError('Unknown condition(s) {0}; available: {1}'.format(
            ', '.join(missing), ', '.join(known)))
    return [(name, config) for name, config in conditions if name in names]


class TrainCommand(BaseCommand):

    name = 'train'
    help = 'Train agent pools and write evaluation curves'
    uses = ('config', 'sigma', 'beta', 'episodes', 'runs', 'jobs')
    options = (
        ('condition', {
            'default': (),
            'type': 'csv',
            'metavar': '<name[,name...]>',
            'help': 'Only train these conditions of the config file'}),
        ('last-k', {
            'default': 1,
            'type': 'int',
            'metavar': '<evaluations>',
            'help': 'Evaluations per run averaged into summary.csv'}),
        ('checkpoints', {
            'default': True,
            'type': 'yn',
            'metavar': '<y_or_n>',
            'help': 'Write a checkpoint per run'}),
    )

    def execute(self, args, out_dir):
        if not args.config:
            raise UsageError('train needs --config')
        if args.last_k < 1:
            raise UsageError('--last-k must be at least 1')
        overrides = config_overrides(args)
        conditions = select_conditions(load_conditions(args.config, overrides), args.condition)
        for name, config in conditions:
            condition_dir = os.path.join(out_dir, name)
            os.makedirs(condition_dir, exist_ok=True)
            log.info('Training condition %s: %d runs of %d episodes', name, config.runs,
                     config.episodes)
            checkpoint_dir = None
            if args.checkpoints:
                checkpoint_dir = os.path.join(condition_dir, 'checkpoints')
            records = eval_records(train(config, checkpoint_dir))
            write_csv(os.path.join(condition_dir, 'eval_curve.csv'), CURVE_COLUMNS, records)
            summary = final_cooperation(records, args.last_k)
            write_csv(os.path.join(condition_dir, 'summary.csv'), SUMMARY_COLUMNS,
                      [(f, rate, config.runs, args.last_k) for f, rate in summary.items()])
            echo = experiment_echo(config)
            echo['condition'] = name
            write_config_echo(condition_dir, self.name, echo)
        self.echo(out_dir, {
            'config': args.config,
            'conditions': [name for name, _ in conditions],
            'overrides': overrides,
            'last_k': args.last_k,
        })


def register(registry):
    '''
    Register the train command
    '''
    registry.register_command(TrainCommand())
