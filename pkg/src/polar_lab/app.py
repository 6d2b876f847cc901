"""
Command-line entry point of the lab.
"""

from __future__ import annotations

import argparse
import sys

from polar_lab.commands import COMMANDS, EXIT_CONFIG, CommandContext
from polar_lab.errors import ConfigError
from polar_lab.settings import LabSettings
from polar_lab.utils import configure_logging, logger


def build_parser() -> argparse.ArgumentParser:
    """Parser of ``lab run`` and ``lab list``."""
    parser = argparse.ArgumentParser(
        prog="lab",
        description=(
            "Polarization, Steiner symmetrization and symmetric decreasing "
            "rearrangement experiments."
        ),
    )
    parser.add_argument(
        "--settings", default=None, help="path to a settings.yml file"
    )
    parser.add_argument(
        "--log-level", default=None, help="override the logging level"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run one experiment config")
    run_parser.add_argument(
        "config", help="config JSON path or a shipped experiment name"
    )
    run_parser.add_argument("--seed", type=int, default=None)
    run_parser.add_argument("--out", default=None, help="output directory")
    run_parser.add_argument("--threads", type=int, default=None)

    sub.add_parser("list", help="list the registered experiments")
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Parse ``argv``, configure logging and dispatch to a command.

    Returns 0 when every check passed, 1 when a check failed or a trial
    aborted and 2 on configuration or usage errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0

    try:
        settings = LabSettings.load(args.settings)
    except ConfigError as exc:
        configure_logging()
        logger.error(f"configuration error: {exc}")
        return EXIT_CONFIG

    log_cfg = settings.section("logging")
    configure_logging(
        args.log_level or log_cfg.get("level", "INFO"), log_cfg.get("format")
    )
    logger.debug(f"settings loaded from {settings.source or 'defaults'}")

    command = COMMANDS[args.command]()
    return command.execute(CommandContext(settings=settings, args=args))


def run():
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
