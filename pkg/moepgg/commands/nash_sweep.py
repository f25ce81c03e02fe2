# -*- coding: utf-8 -*-
'''
    moepgg.commands.nash_sweep
    ~~~~~~~~~~~~~~~~~~~~~~~~~~

    Lattice Nash equilibria of the two player game for every (f, beta) cell,
    plus the equilibrium clusters found in each cell.
'''

# Import Python libs
from __future__ import annotations
import logging
import os

# Import moepgg libs
from moepgg.analysis import SweepGrid, cluster_equilibria, find_nash_equilibria
from moepgg.commands.base import BaseCommand, beta_range, cells, parallel_map
from moepgg.exceptions import UsageError
from moepgg.game import GameSpec, RiskPreference
from moepgg.output import write_csv

log = logging.getLogger(__name__)

COLUMNS = ('f', 'beta', 'p0', 'p1', 'ser0', 'ser1', 'on_pcs', 'cluster')
CLUSTER_COLUMNS = ('f', 'beta', 'cluster', 'size', 'p_sum_min', 'p_sum_max', 's_star')
DEFAULT_FS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
BETA_RANGE = (0.0, 3.0, 0.1)


def sweep_cell(cell):
    '''
    ``(rows, cluster_rows)`` of one ``(f, beta, coins, resolution)`` cell
    '''
    f, beta, coins, resolution = cell
    grid = SweepGrid(resolution)
    spec = GameSpec.symmetric(2, coins, f)
    pref = RiskPreference(beta)
    equilibria = find_nash_equilibria(spec, pref, grid)
    if not equilibria:
        log.warning('No equilibrium found for f=%s beta=%s at resolution %s',
                    f, beta, resolution)
    clusters = cluster_equilibria(equilibria, grid, spec, pref)
    rows = []
    cluster_rows = []
    for number, cluster in enumerate(clusters):
        cluster_rows.append((f, beta, number, cluster.size, cluster.p_sum_min,
                             cluster.p_sum_max, cluster.stationarity_sum))
        for result in cluster.members:
            p0, p1 = result.strategy.coop_probs
            rows.append((f, beta, p0, p1, result.ser_values[0], result.ser_values[1],
                         result.on_pareto_front, number))
    return rows, cluster_rows


class NashSweepCommand(BaseCommand):

    name = 'nash-sweep'
    help = 'Write lattice Nash equilibria over a grid of f and beta'
    uses = ('f', 'beta', 'resolution', 'jobs')
    options = (
        ('beta-range', {
            'default': BETA_RANGE,
            'type': 'floats',
            'metavar': '<start,stop,step>',
            'help': 'Inclusive beta range used when --beta is not given'}),
        ('coins', {
            'default': 4.0,
            'type': 'float',
            'metavar': '<coins>',
            'help': 'Endowment of both players'}),
    )

    def betas(self, args):
        if args.beta is not None:
            return self.require('beta', args.beta)
        if len(args.beta_range) != 3:
            raise UsageError('--beta-range takes start,stop,step')
        return beta_range(*args.beta_range)

    def execute(self, args, out_dir):
        grid = self.grid(args)
        fs = self.require('f', args.f) or DEFAULT_FS
        betas = self.betas(args)
        work = [(f, beta, args.coins, grid.resolution) for f, beta in cells(fs, betas)]
        rows = []
        cluster_rows = []
        for cell_rows, cell_clusters in parallel_map(sweep_cell, work, args.jobs):
            rows.extend(cell_rows)
            cluster_rows.extend(cell_clusters)
        write_csv(os.path.join(out_dir, 'nash_sweep.csv'), COLUMNS, rows)
        write_csv(os.path.join(out_dir, 'nash_clusters.csv'), CLUSTER_COLUMNS, cluster_rows)
        log.info('%d equilibria in %d cells', len(rows), len(work))
        self.echo(out_dir, {
            'f': list(fs),
            'beta': list(betas),
            'coins': args.coins,
            'resolution': grid.resolution,
            'on_pcs': 'strategy lies on the Pareto front of both players',
        })


def register(registry):
    '''
    Register the nash-sweep command
    '''
    registry.register_command(NashSweepCommand())
