# -*- coding: utf-8 -*-
'''
    moepgg.commands.poa
    ~~~~~~~~~~~~~~~~~~~

    Price of anarchy of the two player game over a grid of f and beta.
'''

# Import Python libs
from __future__ import annotations
import logging
import os

# Import moepgg libs
from moepgg.analysis import (
    SweepGrid,
    find_nash_equilibria,
    price_of_anarchy,
    social_optimum,
    welfare,
)
from moepgg.commands.base import BaseCommand, cells, parallel_map
from moepgg.commands.nash_sweep import DEFAULT_FS, NashSweepCommand
from moepgg.game import GameSpec, RiskPreference
from moepgg.output import write_csv

log = logging.getLogger(__name__)

COLUMNS = ('f', 'beta', 'poa', 'best_welfare', 'worst_ne_welfare', 'n_equilibria',
           'optimum_p0', 'optimum_p1')


def poa_cell(cell):
    f, beta, coins, resolution = cell
    grid = SweepGrid(resolution)
    spec = GameSpec.symmetric(2, coins, f)
    pref = RiskPreference(beta)
    optimum, best = social_optimum(spec, pref, grid)
    equilibria = find_nash_equilibria(spec, pref, grid)
    if not equilibria:
        log.warning('No equilibrium for f=%s beta=%s; price of anarchy left empty', f, beta)
        return (f, beta, None, best, None, 0) + optimum.coop_probs
    worst = min(welfare(spec, result.strategy, pref) for result in equilibria)
    poa = price_of_anarchy(spec, pref, grid, equilibria)
    return (f, beta, poa, max(best, worst), worst, len(equilibria)) + optimum.coop_probs


class PriceOfAnarchyCommand(NashSweepCommand):

    name = 'poa'
    help = 'Write the price of anarchy over a grid of f and beta'

    def execute(self, args, out_dir):
        grid = self.grid(args)
        fs = self.require('f', args.f) or DEFAULT_FS
        betas = self.betas(args)
        work = [(f, beta, args.coins, grid.resolution) for f, beta in cells(fs, betas)]
        rows = parallel_map(poa_cell, work, args.jobs)
        write_csv(os.path.join(out_dir, 'poa.csv'), COLUMNS, rows)
        self.echo(out_dir, {
            'f': list(fs),
            'beta': list(betas),
            'beta_range': list(args.beta_range) if args.beta is None else None,
            'coins': args.coins,
            'resolution': grid.resolution,
        })


def register(registry):
    '''
    Register the poa command
    '''
    registry.register_command(PriceOfAnarchyCommand())
