"""
Command-line entry point.

Usage:
    sixghz-coexistence [-v | -q] [--threads N] <command> [options]

Exit status: 0 on success, 1 on invalid input (usage, scenario, parameter or geodata errors),
2 on any other failure.
"""

import argparse
import logging
import os
import re
import sys
from typing import List, Optional, Sequence

from . import __version__
from .commands import casestudy, compare_random, coverage, game, rate_surface, validate
from .commands.base import CommandError
from .exceptions import GeodataError, ParameterError, ScenarioValidationError

logger = logging.getLogger(__name__)

COMMANDS = [
    coverage.Command,
    rate_surface.Command,
    game.Command,
    compare_random.Command,
    validate.Command,
    casestudy.Command,
]

THREADS_ENV = "SIXGHZ_THREADS"

NEGATIVE_VALUE = re.compile(r"^-\d")


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def default_threads() -> int:
    value = os.environ.get(THREADS_ENV)
    if not value:
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got '{value}'")
    if threads < 1:
        raise UsageError(f"{THREADS_ENV} must be >= 1, got {threads}")
    return threads


def join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ``--opt -10:20:1`` into ``--opt=-10:20:1`` so argparse reads it as a value."""
    joined = []
    for token in argv:
        if (
            joined
            and NEGATIVE_VALUE.match(token)
            and joined[-1].startswith("--")
            and "=" not in joined[-1]
        ):
            joined[-1] = f"{joined[-1]}={token}"
        else:
            joined.append(token)
    return joined


def build_parser(stdout=None):
    parser = ArgumentParser(
        prog="sixghz-coexistence",
        description="Coexistence of cellular and WiFi networks in the 6-GHz band",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    parser.add_argument(
        "--threads",
        type=int,
        help=f"Worker threads (default: ${THREADS_ENV} or 1)",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)
    for command_class in COMMANDS:
        command = command_class(stdout=stdout)
        subparser = subparsers.add_parser(command.name, help=command.help)
        command.add_common_arguments(subparser)
        command.add_arguments(subparser)
        subparser.set_defaults(handler=command)
    return parser


def configure_logging(options):
    level = logging.INFO
    if options.verbose:
        level = logging.DEBUG
    elif options.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        options = build_parser(stdout).parse_args(join_negative_values(argv))
        if options.threads is None:
            options.threads = default_threads()
        elif options.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {options.threads}")
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return 1
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0

    configure_logging(options)
    try:
        return options.handler.execute(options, argv)
    except (ScenarioValidationError, ParameterError, GeodataError) as e:
        logger.error(str(e))
        return 1
    except CommandError as e:
        logger.error(str(e))
        return e.returncode
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        logger.error(f"{type(e).__name__}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
