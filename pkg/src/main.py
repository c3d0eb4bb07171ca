#!/usr/bin/env python3
"""
Main entry point for mvga.
"""

from __future__ import annotations

import logging
import sys
from typing import NoReturn

from .cli import parse_args
from .commands import COMMANDS
from .config.config import runtime_config
from .errors import MvgaError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging() -> None:
    """Set the root log level from MVGA_LOG_LEVEL."""
    level_name = runtime_config.settings().log_level
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        print(f"WARNING: unknown MVGA_LOG_LEVEL '{level_name}', using WARNING", file=sys.stderr)
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def run(argv: list[str] | None = None) -> int:
    """Parse arguments and dispatch; returns the exit code."""
    runtime_config.ensure_loaded()
    try:
        args = parse_args(argv)
        configure_logging()
        return COMMANDS[args.command](args)
    except (MvgaError, ValueError, OSError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> NoReturn:
    """Main entry point for the mvga command."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
