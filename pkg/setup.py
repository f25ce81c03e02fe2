#!/usr/bin/env python
# -*- coding: utf-8 -*-
'''
The setup script for moepgg
'''
import io
import os
import sys

from setuptools import setup

# Change to the source directory prior to running any command
try:
    SETUP_DIRNAME = os.path.dirname(__file__)
except NameError:
    # We're most likely being frozen and __file__ triggered this NameError
    SETUP_DIRNAME = os.path.dirname(sys.argv[0])


if SETUP_DIRNAME != '':
    os.chdir(SETUP_DIRNAME)

MOEPGG_REQS = os.path.join(os.path.abspath(SETUP_DIRNAME), 'requirements.txt')
MOEPGG_DEV_REQS = os.path.join(os.path.abspath(SETUP_DIRNAME), 'requirements-dev.txt')


def _parse_requirements_file(requirements_file):
    '''
    Parse a requirements file and return a list suitable for
    passing to ``install_requires`` parameter in ``setup()``.
    '''
    parsed_requirements = []
    with open(requirements_file) as rfh:
        for line in rfh.readlines():
            line = line.strip()
            if not line or line.startswith(('#', '-r')):
                continue
            parsed_requirements.append(line)
    return parsed_requirements


def _release_version():
    '''
    Returns release version
    '''
    with io.open(os.path.join(SETUP_DIRNAME, 'moepgg', 'version.py'), encoding='utf-8') as fh_:
        exec_locals = {}
        exec_globals = {}
        exec(fh_.read(), exec_globals, exec_locals)
        return exec_locals['__version__']


NAME = 'moepgg'
VERSION = _release_version()
DESCRIPTION = (
    'Multi-objective extended public goods game: equilibrium analysis and '
    'multi-agent learning experiments under risk preferences.'
)

setup(
    name=NAME,
    version=VERSION,
    description=DESCRIPTION,
    classifiers=[
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Operating System :: POSIX :: Linux',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    packages=[
        'moepgg',
        'moepgg.commands',
    ],
    python_requires='>=3.8',
    install_requires=_parse_requirements_file(MOEPGG_REQS),
    extras_require={'dev': _parse_requirements_file(MOEPGG_DEV_REQS)},
    entry_points={
        'console_scripts': [
            'moepgg = moepgg.cli:main',
        ],
    },
)
