# -*- coding: utf-8 -*-
'''
    moepgg.exceptions
    ~~~~~~~~~~~~~~~~~

    Exceptions raised by moepgg. Everything derives from ``MOEPGGError`` so
    the command line front-end can tell our failures from programming errors.
'''


class MOEPGGError(Exception):
    '''
    Base class for every moepgg error
    '''


class GameSpecError(MOEPGGError, ValueError):
    '''
    Invalid game definition, action profile or joint strategy
    '''


class PlayerIndexError(GameSpecError, IndexError):
    '''
    Player index outside ``range(n_players)``
    '''


class UtilityDomainError(MOEPGGError, ValueError):
    '''
    The utility is undefined for the given return vector
    '''


class NoEquilibriumError(MOEPGGError):
    '''
    A sweep found no Nash equilibrium on the lattice
    '''


class EmptyBatchError(MOEPGGError):
    '''
    An update was requested without any transitions
    '''


class ConfigError(MOEPGGError):
    '''
    Invalid configuration file or option value
    '''


class CheckpointError(MOEPGGError):
    '''
    A checkpoint could not be written or read back
    '''


class UsageError(MOEPGGError):
    '''
    Bad command line usage
    '''
