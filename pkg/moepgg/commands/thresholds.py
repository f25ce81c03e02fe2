# -*- coding: utf-8 -*-
'''
    moepgg.commands.thresholds
    ~~~~~~~~~~~~~~~~~~~~~~~~~~

    Minimum opponent cooperation probability above which cooperating is the
    best response, over a grid of multiplication factors and betas.

    ``threshold`` follows the strict reading: cooperation is the best
    response for every opponent probability strictly above it. Cells where
    no probability up to 1 makes cooperation strictly better are written as
    ``1`` with ``attainable`` false. ``weak_at_zero`` reports the weak
    reading at the lower end, whether cooperating already ties or beats
    defecting against a pure defector.
'''

# Import Python libs
from __future__ import annotations
import logging
import os

# Import moepgg libs
from moepgg.analysis import (
    THRESHOLD_TOLERANCE,
    best_response_coop_threshold,
    cooperation_weakly_preferred_at_zero,
)
from moepgg.commands.base import BaseCommand, cells
from moepgg.output import write_csv

log = logging.getLogger(__name__)

COLUMNS = ('f', 'beta', 'coins', 'threshold_or_NA', 'attainable', 'weak_at_zero')
UNATTAINABLE = 'NA'
DEFAULT_FS = (0.5, 1.0, 1.5, 2.5)
DEFAULT_BETAS = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0)


def threshold_rows(fs, betas, coins, tolerance=THRESHOLD_TOLERANCE):
    rows = []
    for f, beta in cells(fs, betas):
        threshold = best_response_coop_threshold(coins, f, beta, tolerance)
        log.debug('f=%s beta=%s threshold=%s', f, beta, threshold)
        rows.append((f, beta, coins, UNATTAINABLE if threshold is None else threshold,
                     threshold is not None,
                     cooperation_weakly_preferred_at_zero(coins, f, beta)))
    return rows


class ThresholdsCommand(BaseCommand):

    name = 'thresholds'
    help = 'Write best-response cooperation thresholds'
    uses = ('f', 'beta')
    options = (
        ('coins', {
            'default': 4.0,
            'type': 'float',
            'metavar': '<coins>',
            'help': 'Endowment of both players'}),
        ('tolerance', {
            'default': THRESHOLD_TOLERANCE,
            'type': 'float',
            'metavar': '<tol>',
            'help': 'Bisection tolerance'}),
    )

    def execute(self, args, out_dir):
        fs = self.require('f', args.f) or DEFAULT_FS
        betas = self.require('beta', args.beta) or DEFAULT_BETAS
        rows = threshold_rows(fs, betas, args.coins, args.tolerance)
        write_csv(os.path.join(out_dir, 'thresholds.csv'), COLUMNS, rows)
        self.echo(out_dir, {
            'f': list(fs),
            'beta': list(betas),
            'coins': args.coins,
            'tolerance': args.tolerance,
            'conventions': {
                'threshold': 'strict: cooperation is the best response for every '
                             'opponent probability above threshold',
                'unattainable': 'threshold written as NA with attainable false',
                'weak_at_zero': 'cooperating ties or beats defecting when the '
                                'opponent never cooperates',
            },
        })


def register(registry):
    '''
    Register the thresholds command
    '''
    registry.register_command(ThresholdsCommand())
