# -*- coding: utf-8 -*-
'''
    tests.conftest
    ~~~~~~~~~~~~~~

    Shared fixtures. Learning checks that train whole populations are marked
    ``slow`` and only run with ``--run-slow``.
'''

# Import 3rd-party libs
import numpy as np
import pytest

# Import moepgg libs
from moepgg.game import GameSpec


def pytest_addoption(parser):
    parser.addoption('--run-slow', action='store_true', default=False,
                     help='Run the slow learning experiments')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--run-slow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --run-slow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def two_player():
    '''
    Factory for the symmetric two player game with 4 coins each
    '''
    def build(f, coins=4.0):
        return GameSpec.symmetric(2, coins, f)
    return build


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.delenv('MOEPGG_OUT_DIR', raising=False)
    return tmp_path / 'out'
