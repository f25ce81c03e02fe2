# -*- coding: utf-8 -*-
'''
    moepgg.commands
    ~~~~~~~~~~~~~~~

    Command plugins of the ``moepgg`` front-end, one module per command.
'''

# Import Python libs
import importlib

COMMAND_MODULES = (
    'payoff_table',
    'thresholds',
    'nash_sweep',
    'poa',
    'pcs',
    'landscape',
    'train',
    'evaluate',
)


def load_commands(registry):
    '''
    Import every command module and call its ``register`` hook
    '''
    for module_name in COMMAND_MODULES:
        module = importlib.import_module('moepgg.commands.{0}'.format(module_name))
        module.register(registry)
    return registry
