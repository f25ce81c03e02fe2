# -*- coding: utf-8 -*-
'''
    moepgg.commands.base
    ~~~~~~~~~~~~~~~~~~~~

    Base class of every command plugin and the registry the command line
    front-end builds its parser from.

    A command declares its own ``options`` as ``(name, {...})`` tuples and
    lists in ``uses`` which shared flags it honours. Each command module
    exposes ``register(registry)``.
'''

# Import Python libs
from __future__ import annotations
import argparse
import logging
import os
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

# Import moepgg libs
from moepgg.analysis import SweepGrid
from moepgg.config import coerce, default_out_dir
from moepgg.exceptions import ConfigError, GameSpecError, UsageError
from moepgg.log import LOG_LEVELS
from moepgg.output import write_config_echo

log = logging.getLogger(__name__)

SHARED_OPTIONS = (
    ('config', {
        'default': None,
        'type': 'string',
        'metavar': '<path>',
        'help': 'YAML run configuration'}),
    ('seed', {
        'default': None,
        'type': 'int',
        'metavar': '<seed>',
        'help': 'Master random seed, 0 unless a config file sets one'}),
    ('out-dir', {
        'default': None,
        'type': 'string',
        'metavar': '<dir>',
        'help': 'Output directory, defaults to $MOEPGG_OUT_DIR or ./moepgg-out'}),
    ('resolution', {
        'default': None,
        'type': 'float',
        'metavar': '<step>',
        'help': 'Strategy lattice step'}),
    ('f', {
        'default': None,
        'type': 'floats',
        'metavar': '<f[,f...]>',
        'help': 'Multiplication factors'}),
    ('beta', {
        'default': None,
        'type': 'floats',
        'metavar': '<beta[,beta...]>',
        'help': 'Risk preference exponents'}),
    ('sigma', {
        'default': None,
        'type': 'floats',
        'metavar': '<sigma[,sigma...]>',
        'help': 'Observation noise on f'}),
    ('episodes', {
        'default': None,
        'type': 'int',
        'metavar': '<episodes>',
        'help': 'Training episodes per run'}),
    ('runs', {
        'default': None,
        'type': 'int',
        'metavar': '<runs>',
        'help': 'Independent runs'}),
    ('jobs', {
        'default': None,
        'type': 'int',
        'metavar': '<processes>',
        'help': 'Worker processes'}),
    ('log-level', {
        'default': 'INFO',
        'type': 'choice',
        'choices': LOG_LEVELS,
        'metavar': '<level>',
        'help': 'Logging level'}),
    ('log-file', {
        'default': None,
        'type': 'string',
        'metavar': '<path>',
        'help': 'Also log to this file'}),
)

ALWAYS_SHARED = ('seed', 'out-dir', 'log-level', 'log-file')


def _argument_type(name: str, spec: Mapping[str, Any]) -> Callable[[str], Any]:
    def convert(text):
        try:
            return coerce(name, spec, text)
        except ConfigError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    convert.__name__ = spec['type']
    return convert


def add_option(parser: argparse.ArgumentParser, name: str, spec: Mapping[str, Any]):
    kwargs = {
        'dest': name.replace('-', '_'),
        'default': spec['default'],
        'metavar': spec['metavar'],
        'help': spec['help'],
    }
    if spec['type'] == 'choice':
        kwargs['choices'] = spec['choices']
        kwargs.pop('metavar')
    else:
        kwargs['type'] = _argument_type(name, spec)
    parser.add_argument('--{0}'.format(name), **kwargs)


class BaseCommand:
    '''
    Subclasses set ``name``, ``help``, ``options`` and ``uses`` and
    implement :meth:`execute`.
    '''

    name = None
    help = None
    options = ()
    uses = ()
    # Resolution used when --resolution is not given
    default_resolution = 0.01

    def configure(self, parser: argparse.ArgumentParser):
        shared = OrderedDict(SHARED_OPTIONS)
        for name in OrderedDict.fromkeys(self.uses + ALWAYS_SHARED):
            add_option(parser, name, shared[name])
        for name, spec in self.options:
            add_option(parser, name, spec)
        parser.set_defaults(command=self)

    def seed(self, args) -> int:
        return 0 if args.seed is None else args.seed

    def out_dir(self, args) -> str:
        path = args.out_dir or default_out_dir()
        os.makedirs(path, exist_ok=True)
        return path

    def resolution(self, args) -> float:
        return args.resolution if args.resolution is not None else self.default_resolution

    def grid(self, args) -> SweepGrid:
        try:
            return SweepGrid(self.resolution(args))
        except GameSpecError as exc:
            raise UsageError(str(exc))

    def require(self, name: str, values: Optional[Sequence]) -> Sequence:
        if values is not None and not len(values):
            raise UsageError('--{0} needs at least one value'.format(name))
        return values

    def echo(self, out_dir: str, parameters: Mapping[str, Any]) -> str:
        return write_config_echo(out_dir, self.name, parameters)

    def run(self, args) -> int:
        out_dir = self.out_dir(args)
        log.debug('Running %s into %s', self.name, out_dir)
        self.execute(args, out_dir)
        return 0

    def execute(self, args, out_dir: str):
        raise NotImplementedError


def parallel_map(func: Callable, items: Iterable, jobs: Optional[int] = None) -> List:
    '''
    ``list(map(func, items))``, in worker processes when ``jobs > 1``.
    Result order never depends on ``jobs``.
    '''
    items = list(items)
    if not jobs or jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, items))


def cells(fs: Sequence[float], betas: Sequence[float]) -> List[Tuple[float, float]]:
    return [(f, beta) for f in fs for beta in betas]


def beta_range(start: float, stop: float, step: float) -> Tuple[float, ...]:
    '''
    Inclusive range of betas, rounded to 10 decimals
    '''
    if step <= 0 or stop < start:
        raise UsageError('Invalid beta range {0},{1},{2}'.format(start, stop, step))
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + index * step, 10) for index in range(count))


class CommandRegistry:
    '''
    Commands by name, in registration order
    '''

    def __init__(self):
        self.commands: Dict[str, BaseCommand] = OrderedDict()

    def register_command(self, command: BaseCommand):
        if command.name in self.commands:
            raise ValueError('Command {0} registered twice'.format(command.name))
        self.commands[command.name] = command

    def __iter__(self):
        return iter(self.commands.values())

    def __contains__(self, name):
        return name in self.commands
