"""
Lab-wide settings loaded from ``settings/settings.yml``.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from polar_lab.errors import ConfigError
from polar_lab.utils import find_project_root, interpolate, logger

DEFAULTS: dict[str, Any] = {
    "lab": {"id": "polar-lab"},
    "project": {
        "root": "${settings_dir}/..",
        "experiments_dir": "${project_root}/settings/experiments",
        "output_dir": "${project_root}/results",
    },
    "runner": {"threads": 1, "chunk_size": 16},
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
    },
    "tolerances": {},
    "charts": {"enabled": True, "log_log": True},
}


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@dataclass
class LabSettings:
    """
    Resolved lab settings.

    :ivar data (dict[str, Any]): Raw settings tree after interpolation.
    :ivar source (Path | None): File the settings came from, if any.
    """

    data: dict[str, Any] = field(default_factory=dict)
    source: Path | None = None

    @classmethod
    def load(cls, path: str | Path | None = None) -> "LabSettings":
        """
        Load settings from ``path``, ``LAB_SETTINGS`` or the project tree.

        Falls back to built-in defaults when no file exists.

        :raises ConfigError: If the file is not a YAML mapping.
        """
        candidate = path or os.environ.get("LAB_SETTINGS")
        if candidate is None:
            candidate = find_project_root() / "settings" / "settings.yml"
        settings_path = Path(candidate)

        if not settings_path.is_file():
            if path is not None:
                raise ConfigError(f"settings file not found: {path}")
            logger.debug("No settings file found, using defaults")
            return cls.from_dict({}, settings_dir=Path.cwd() / "settings")

        try:
            with settings_path.open("r", encoding="utf-8") as fh:
                raw = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(
                f"invalid YAML in {settings_path}: {exc}"
            ) from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{settings_path} must hold a mapping")

        settings = cls.from_dict(raw, settings_dir=settings_path.parent)
        settings.source = settings_path
        return settings

    @classmethod
    def from_dict(
        cls, raw: dict[str, Any], *, settings_dir: Path
    ) -> "LabSettings":
        """Merge ``raw`` over the defaults and resolve placeholders."""
        merged = _merge(DEFAULTS, raw)
        variables = {"settings_dir": str(settings_dir.resolve())}
        root = interpolate(merged["project"]["root"], variables)
        variables["project_root"] = str(Path(root).resolve())
        return cls(data=interpolate(merged, variables))

    def section(self, name: str) -> dict[str, Any]:
        """Return a top-level section, empty if missing."""
        value = self.data.get(name, {}) or {}
        if not isinstance(value, dict):
            raise ConfigError(f"settings section '{name}' must be a mapping")
        return value

    @property
    def experiments_dir(self) -> Path:
        """Directory holding the shipped experiment configs."""
        return Path(self.section("project")["experiments_dir"])

    @property
    def output_dir(self) -> Path:
        """Default directory for CSV and SVG output."""
        return Path(self.section("project")["output_dir"])

    @property
    def threads(self) -> int:
        """Default worker count."""
        return max(1, int(self.section("runner").get("threads", 1)))

    @property
    def chunk_size(self) -> int:
        """Trials handed to a worker at once."""
        return max(1, int(self.section("runner").get("chunk_size", 16)))

    @property
    def tolerances(self) -> dict[str, float]:
        """Named tolerance overrides applied to every experiment."""
        return {
            str(k): float(v) for k, v in self.section("tolerances").items()
        }


__all__ = ["LabSettings", "DEFAULTS"]
