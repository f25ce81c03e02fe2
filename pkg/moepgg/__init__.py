# -*- coding: utf-8 -*-
'''
    moepgg
    ~~~~~~

    Multi-objective extended public goods game: payoffs, equilibrium
    analysis and a population of independent multi-objective DQN learners.
'''

from moepgg.version import __version__  # noqa: F401
