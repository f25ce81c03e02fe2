# -*- coding: utf-8 -*-
'''
    moepgg.commands.payoff_table
    ~~~~~~~~~~~~~~~~~~~~~~~~~~~~

    Vector payoffs of every player for every pure profile.
'''

# Import Python libs
from __future__ import annotations
import os

# Import moepgg libs
from moepgg.commands.base import BaseCommand
from moepgg.exceptions import UsageError
from moepgg.game import GameSpec, classify_game, payoff_table
from moepgg.output import write_csv

MAX_PLAYERS = 4
COLUMNS = ('f', 'game_class', 'profile', 'player', 'collective', 'individual')


class PayoffTableCommand(BaseCommand):

    name = 'payoff-table'
    help = 'Write the vector payoff matrices of small games'
    uses = ('f',)
    options = (
        ('players', {
            'default': 2,
            'type': 'int',
            'metavar': '<n>',
            'help': 'Number of players, at most {0}'.format(MAX_PLAYERS)}),
        ('coins', {
            'default': 4.0,
            'type': 'float',
            'metavar': '<coins>',
            'help': 'Endowment of every player'}),
    )
    default_fs = (0.5, 1.5, 2.5)

    def execute(self, args, out_dir):
        if not 2 <= args.players <= MAX_PLAYERS:
            raise UsageError('--players must lie between 2 and {0}, got {1}'.format(
                MAX_PLAYERS, args.players))
        fs = self.require('f', args.f) or self.default_fs
        rows = []
        for f in fs:
            spec = GameSpec.symmetric(args.players, args.coins, f)
            game_class = classify_game(spec).value
            for profile, rewards in payoff_table(spec):
                for player, reward in enumerate(rewards):
                    rows.append((f, game_class, str(profile), player,
                                 reward.collective, reward.individual))
        write_csv(os.path.join(out_dir, 'payoff_table.csv'), COLUMNS, rows)
        self.echo(out_dir, {'players': args.players, 'coins': args.coins, 'f': list(fs)})


def register(registry):
    '''
    Register the payoff-table command
    '''
    registry.register_command(PayoffTableCommand())
