# -*- coding: utf-8 -*-

# Import Python libs
import glob
import os

# Import 3rd-party libs
from pycodestyle import StyleGuide

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# indentation, line length, whitespace and syntax checks
SELECTED = ('E101', 'E111', 'E501', 'E9', 'W191', 'W291', 'W293', 'W391')


def test_sources_follow_codestyle():
    paths = sorted(glob.glob(os.path.join(ROOT, 'moepgg', '**', '*.py'), recursive=True))
    paths += sorted(glob.glob(os.path.join(ROOT, 'tests', '*.py')))
    assert paths
    style = StyleGuide(parse_argv=False, config_file=False, quiet=True,
                       max_line_length=100, select=SELECTED)
    report = style.check_files(paths)
    assert report.total_errors == 0
