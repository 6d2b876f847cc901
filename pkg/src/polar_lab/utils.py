"""
Polar lab utils
"""

from __future__ import annotations

import logging
import os
import re
from pathlib import Path
from typing import Any

logger = logging.getLogger("polar_lab")

DEFAULT_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_PLACEHOLDER = re.compile(r"\$\{([a-zA-Z_][a-zA-Z0-9_]*)\}")


def configure_logging(level: str = "INFO", fmt: str | None = None) -> None:
    """
    Attach a stream handler to the package logger.

    Calling it twice replaces the previous handler instead of stacking.

    :param level: Logging level name.
    :type level: str

    :param fmt: Record format, defaults to ``DEFAULT_LOG_FORMAT``.
    :type fmt: str | None
    """
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(fmt or DEFAULT_LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(str(level).upper())
    logger.propagate = False


def find_project_root() -> Path:
    """Return the directory holding ``settings/settings.yml``.

    Works in:
    - dev: repo root (when running from source tree)
    - explicit: ``LAB_PROJECT_ROOT`` env var
    - installed: current working directory as a fallback
    """
    env_root = os.environ.get("LAB_PROJECT_ROOT")
    if env_root:
        return Path(env_root).resolve()

    here = Path(__file__).resolve()
    for parent in here.parents:
        if (parent / "settings" / "settings.yml").is_file():
            return parent
    return Path.cwd()


def interpolate(value: Any, variables: dict[str, str]) -> Any:
    """
    Replace ``${name}`` placeholders in every string of a nested payload.

    Variables may reference each other; unknown names are left as is.
    """
    if isinstance(value, dict):
        return {k: interpolate(v, variables) for k, v in value.items()}
    if isinstance(value, list):
        return [interpolate(v, variables) for v in value]
    if not isinstance(value, str):
        return value

    def _sub(match: re.Match) -> str:
        return variables.get(match.group(1), match.group(0))

    previous = None
    current = value
    while previous != current:
        previous = current
        current = _PLACEHOLDER.sub(_sub, current)
    return current


__all__ = [
    "logger",
    "configure_logging",
    "find_project_root",
    "interpolate",
]
