# -*- coding: utf-8 -*-
'''
    moepgg.output
    ~~~~~~~~~~~~~

    Result files. CSVs carry a header row, UTF-8 text with LF line endings
    and floats written with 9 significant digits; JSON files use sorted keys
    and a two space indent. Nothing written here depends on the clock, so
    re-running a command reproduces its files byte for byte.
'''

# Import Python libs
from __future__ import annotations
import csv
import json
import logging
import math
import os
from typing import Any, Iterable, Mapping, Sequence

# Import 3rd-party libs
import numpy as np

# Import moepgg libs
from moepgg.version import __version__

log = logging.getLogger(__name__)

CONFIG_ECHO = 'config_echo.json'


def format_value(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if value == 0:
            return '0'
        return '{0:.9g}'.format(value)
    return str(value)


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    '''
    Write ``rows`` below a ``columns`` header and return ``path``
    '''
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError('Row {0} does not match columns {1}'.format(row, columns))
            writer.writerow([format_value(value) for value in row])
            count += 1
    log.debug('Wrote %d rows to %s', count, path)
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return value
    return value


def write_json(path: str, payload: Mapping[str, Any]) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        json.dump(_jsonable(payload), handle, sort_keys=True, indent=2)
        handle.write('\n')
    return path


def write_config_echo(out_dir: str, command: str, parameters: Mapping[str, Any]) -> str:
    '''
    ``config_echo.json`` holding the command name, package version and every
    resolved parameter.
    '''
    payload = {
        'command': command,
        'version': __version__,
        'parameters': parameters,
    }
    return write_json(os.path.join(out_dir, CONFIG_ECHO), payload)
