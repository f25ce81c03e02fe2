# -*- coding: utf-8 -*-
'''
    moepgg.log
    ~~~~~~~~~~

    Logging setup for the command line front-end. Library modules only
    create their own ``logging.getLogger(__name__)`` loggers.
'''

# Import Python libs
from __future__ import annotations
import logging
import os
from typing import Optional

LOG_FORMAT = '%(asctime)s [%(levelname)-8s] %(name)s: %(message)s'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None):
    '''
    Configure the root logger with a stream handler and, when ``log_file``
    is given, a file handler. Calling it again replaces both.
    '''
    numeric = getattr(logging, str(level).upper(), None)
    if not isinstance(numeric, int):
        raise ValueError('Unknown log level: {0}'.format(level))
    handlers = [logging.StreamHandler()]
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, mode='w', encoding='utf-8'))
    logging.basicConfig(level=numeric, format=LOG_FORMAT, handlers=handlers, force=True)
    # numpy warnings are reported through the warnings module
    logging.captureWarnings(True)
