from __future__ import annotations

import argparse
import os
from collections.abc import Sequence
from typing import NoReturn

from more_itertools import first_true

from .commands import BaseGrwsCommand
from .constants import PACKAGE_NAME, PACKAGE_VERSION
from .decorators import exit_code_on_error
from .errors import InvalidArgument
from .log import log_debug
from .settings import use_settings_file
from .types import OutputFormat


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise InvalidArgument(message)


def command_classes() -> list[type[BaseGrwsCommand]]:
    return BaseGrwsCommand.__subclasses__()


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog=PACKAGE_NAME,
        description="Exact computations on geometrically regular weighted shifts.",
    )
    parser.add_argument("--version", action="version", version=f"{PACKAGE_NAME} {PACKAGE_VERSION}")
    parser.add_argument("--settings", help="JSON file merged over the bundled settings")
    parser.add_argument("--debug", action="store_true", help="log debug messages to stderr")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[str(fmt) for fmt in OutputFormat], default=str(OutputFormat.JSON))

    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for command_class in command_classes():
        subparser = subparsers.add_parser(command_class.name, help=command_class.help, parents=[common])
        command_class().add_arguments(subparser)
    return parser


@exit_code_on_error
def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.settings and not os.path.isfile(args.settings):
        raise InvalidArgument(f"settings file not found: {args.settings}")
    use_settings_file(args.settings, {"debug": True} if args.debug else None)
    command_class = first_true(command_classes(), pred=lambda command: command.name == args.command)
    if command_class is None:
        raise InvalidArgument(f"unknown command {args.command!r}")
    log_debug(f"running {args.command} with {vars(args)}")
    return command_class().execute(args)
