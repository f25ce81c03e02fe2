# -*- coding: utf-8 -*-
'''
    moepgg.commands.pcs
    ~~~~~~~~~~~~~~~~~~~

    Pareto coverage set of each player on the strategy lattice.
'''

# Import Python libs
from __future__ import annotations
import os

# Import moepgg libs
from moepgg.analysis import expected_vector_return, pareto_coverage_set
from moepgg.commands.base import BaseCommand
from moepgg.game import GameSpec
from moepgg.output import write_csv

COLUMNS = ('f', 'player', 'p0', 'p1', 'collective', 'individual')


class ParetoCoverageCommand(BaseCommand):

    name = 'pcs'
    help = 'Write the per-player Pareto coverage sets'
    uses = ('f', 'resolution')
    options = (
        ('coins', {
            'default': 4.0,
            'type': 'float',
            'metavar': '<coins>',
            'help': 'Endowment of both players'}),
    )
    default_resolution = 0.1
    default_fs = (0.5, 1.5, 2.5)

    def execute(self, args, out_dir):
        grid = self.grid(args)
        fs = self.require('f', args.f) or self.default_fs
        rows = []
        for f in fs:
            spec = GameSpec.symmetric(2, args.coins, f)
            for player in range(2):
                for strategy in pareto_coverage_set(spec, grid, player):
                    payoff = expected_vector_return(spec, strategy, player)
                    rows.append((f, player) + strategy.coop_probs + tuple(payoff))
        write_csv(os.path.join(out_dir, 'pcs.csv'), COLUMNS, rows)
        self.echo(out_dir, {'f': list(fs), 'coins': args.coins, 'resolution': grid.resolution})


def register(registry):
    '''
    Register the pcs command
    '''
    registry.register_command(ParetoCoverageCommand())
