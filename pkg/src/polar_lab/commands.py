"""
Commands behind the ``lab`` subcommands.
"""

from __future__ import annotations

import dataclasses
import os
from argparse import Namespace
from dataclasses import dataclass

from polar_lab.errors import ConfigError, LabError
from polar_lab.experiments import (
    ExperimentConfig,
    get_experiment,
    list_experiments,
    run_experiment,
)
from polar_lab.settings import LabSettings
from polar_lab.utils import logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

THREADS_ENV = "LAB_THREADS"


@dataclass
class CommandContext:
    """
    What a command runs against.

    :ivar settings (LabSettings): Resolved lab settings.
    :ivar args (Namespace): Parsed command-line arguments.
    """

    settings: LabSettings
    args: Namespace


class Command:
    """Base class of the CLI commands."""

    def execute(self, context: CommandContext) -> int:
        """Run the command and return the process exit code."""
        raise NotImplementedError


def resolve_threads(cli_value: int | None, settings: LabSettings) -> int:
    """
    Worker count: ``--threads``, then ``LAB_THREADS``, then the settings.

    :raises ConfigError: If the chosen value is not a positive integer.
    """
    if cli_value is not None:
        value = cli_value
        source = "--threads"
    elif os.environ.get(THREADS_ENV):
        raw = os.environ[THREADS_ENV]
        source = THREADS_ENV
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(
                f"{THREADS_ENV} must be an integer: {raw}"
            ) from exc
    else:
        return settings.threads
    if value < 1:
        raise ConfigError(f"{source} must be >= 1, got {value}")
    return value


def load_config(
    path: str, settings: LabSettings, *, seed=None, out=None
) -> ExperimentConfig:
    """
    Read an experiment config, apply the CLI overrides and lay the
    settings tolerances under the config's own.

    A bare name such as ``lower-cone`` is looked up in the experiments
    directory of the settings.
    """
    candidate = settings.experiments_dir / f"{path}.json"
    if not os.path.exists(path) and candidate.is_file():
        path = str(candidate)
    config = ExperimentConfig.load(path)
    tolerances = {**settings.tolerances, **config.tolerances}
    config = dataclasses.replace(config, tolerances=tolerances)
    return config.with_overrides(seed=seed, output_dir=out)


class RunCommand(Command):
    """``lab run <config> [--seed N] [--out DIR] [--threads N]``."""

    def execute(self, context: CommandContext) -> int:
        args, settings = context.args, context.settings
        try:
            config = load_config(
                args.config, settings, seed=args.seed, out=args.out
            )
            threads = resolve_threads(args.threads, settings)
            charts = settings.section("charts")
            out_dir = args.out or config.output.get("dir")
            summary = run_experiment(
                config,
                threads=threads,
                chunk_size=settings.chunk_size,
                out_dir=out_dir or settings.output_dir,
                charts=bool(charts.get("enabled", True)),
                log_log=bool(charts.get("log_log", True)),
            )
        except ConfigError as exc:
            logger.error(f"configuration error: {exc}")
            return EXIT_CONFIG
        except LabError as exc:
            logger.error(f"run aborted: {type(exc).__name__}: {exc}")
            return EXIT_FAILED

        if summary.passed:
            logger.info(f"{summary.experiment}: all checks passed")
            return EXIT_OK
        failed = [c.name for c in summary.checks if not c.passed]
        logger.warning(
            f"{summary.experiment}: {len(failed)} check(s) failed: "
            f"{', '.join(failed)}"
        )
        return EXIT_FAILED


class ListCommand(Command):
    """``lab list``: registered experiments with their summaries."""

    def execute(self, context: CommandContext) -> int:
        shipped = context.settings.experiments_dir
        for name in list_experiments():
            cls = get_experiment(name)
            config = shipped / f"{name}.json"
            marker = "*" if config.is_file() else " "
            print(f"{marker} {name:<20} {cls.description}")
        return EXIT_OK


COMMANDS: dict[str, type[Command]] = {
    "run": RunCommand,
    "list": ListCommand,
}

__all__ = [
    "CommandContext",
    "Command",
    "RunCommand",
    "ListCommand",
    "COMMANDS",
    "resolve_threads",
    "load_config",
    "EXIT_OK",
    "EXIT_FAILED",
    "EXIT_CONFIG",
]
