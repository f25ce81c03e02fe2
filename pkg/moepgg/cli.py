# -*- coding: utf-8 -*-
'''
    moepgg.cli
    ~~~~~~~~~~

    ``moepgg`` command line front-end.

    Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures.
'''

# Import Python libs
from __future__ import annotations
import argparse
import logging
import sys
from typing import Optional, Sequence

# Import moepgg libs
from moepgg.commands import load_commands
from moepgg.commands.base import CommandRegistry
from moepgg.exceptions import MOEPGGError, UsageError
from moepgg.log import setup_logging
from moepgg.version import __version__

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class ArgumentParser(argparse.ArgumentParser):
    '''
    Argument errors exit with the usage exit code
    '''

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{0}: error: {1}\n'.format(self.prog, message))


def build_parser(registry: CommandRegistry) -> ArgumentParser:
    parser = ArgumentParser(
        prog='moepgg',
        description='Multi-objective extended public goods game analysis and experiments',
    )
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command_name', metavar='<command>')
    subparsers.required = True
    for command in registry:
        command.configure(subparsers.add_parser(command.name, help=command.help))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    registry = load_commands(CommandRegistry())
    args = build_parser(registry).parse_args(argv)
    setup_logging(args.log_level, args.log_file)
    try:
        return args.command.run(args)
    except UsageError as exc:
        log.error('%s', exc)
        return EXIT_USAGE
    except (MOEPGGError, OSError) as exc:
        log.error('%s failed: %s', args.command_name, exc)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
