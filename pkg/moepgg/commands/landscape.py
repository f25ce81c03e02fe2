# -*- coding: utf-8 -*-
'''
    moepgg.commands.landscape
    ~~~~~~~~~~~~~~~~~~~~~~~~~

    SER matrices over the whole strategy lattice for each (f, beta) pair:
    rows are player 0's cooperation probability, columns player 1's. Player
    0's matrix keeps the plain name, player 1's and the welfare matrix get a
    suffix.
'''

# Import Python libs
from __future__ import annotations
import os

# Import moepgg libs
from moepgg.analysis import SweepGrid, ser_landscape
from moepgg.commands.base import BaseCommand, cells
from moepgg.game import GameSpec, RiskPreference
from moepgg.output import format_value, write_csv

MATRICES = ('', 'p1', 'welfare')


def landscape_filename(f: float, beta: float, suffix: str = '') -> str:
    stem = 'ser_landscape_{0}_{1}'.format(format_value(f), format_value(beta))
    if suffix:
        stem = '{0}_{1}'.format(stem, suffix)
    return stem + '.csv'


def write_matrix(path: str, grid: SweepGrid, matrix) -> str:
    columns = ['p0'] + [format_value(grid.value(j)) for j in range(len(grid))]
    rows = [[grid.value(i)] + list(matrix[i]) for i in range(len(grid))]
    return write_csv(path, columns, rows)


class LandscapeCommand(BaseCommand):

    name = 'landscape'
    help = 'Write SER landscapes of both players'
    uses = ('f', 'beta', 'resolution')
    options = (
        ('coins', {
            'default': 4.0,
            'type': 'float',
            'metavar': '<coins>',
            'help': 'Endowment of both players'}),
    )
    default_resolution = 0.05
    default_fs = (0.5, 1.5, 2.5)
    default_betas = (0.5, 1.0, 2.0)

    def execute(self, args, out_dir):
        grid = self.grid(args)
        fs = self.require('f', args.f) or self.default_fs
        betas = self.require('beta', args.beta) or self.default_betas
        files = []
        for f, beta in cells(fs, betas):
            spec = GameSpec.symmetric(2, args.coins, f)
            pref = RiskPreference(beta)
            ser0 = ser_landscape(spec, pref, grid, 0)
            ser1 = ser_landscape(spec, pref, grid, 1)
            for suffix, matrix in zip(MATRICES, (ser0, ser1, ser0 + ser1)):
                filename = landscape_filename(f, beta, suffix)
                write_matrix(os.path.join(out_dir, filename), grid, matrix)
                files.append(filename)
        self.echo(out_dir, {
            'f': list(fs),
            'beta': list(betas),
            'coins': args.coins,
            'resolution': grid.resolution,
            'layout': 'rows p0, columns p1',
            'files': files,
        })


def register(registry):
    '''
    Register the landscape command
    '''
    registry.register_command(LandscapeCommand())
