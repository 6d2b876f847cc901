"""
Name-to-class registry of experiments.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Callable, TypeVar

from polar_lab.errors import ConfigError

if TYPE_CHECKING:
    from polar_lab.experiments.base import Experiment

ExperimentT = TypeVar("ExperimentT", bound="type[Experiment]")

_REGISTRY: dict[str, "type[Experiment]"] = {}


def register_experiment(name: str) -> Callable[[ExperimentT], ExperimentT]:
    """
    Class decorator making an experiment reachable by ``name``.

    :raises ValueError: If ``name`` is already taken by another class.
    """

    def _decorate(cls: ExperimentT) -> ExperimentT:
        existing = _REGISTRY.get(name)
        if existing is not None and existing is not cls:
            raise ValueError(f"experiment '{name}' is already registered")
        cls.name = name
        _REGISTRY[name] = cls
        return cls

    return _decorate


def get_experiment(name: str) -> "type[Experiment]":
    """
    Look up a registered experiment.

    :raises ConfigError: If no experiment has that name.
    """
    try:
        return _REGISTRY[name]
    except KeyError as exc:
        known = ", ".join(sorted(_REGISTRY)) or "none"
        raise ConfigError(
            f"unknown experiment '{name}' (known: {known})"
        ) from exc


def list_experiments() -> list[str]:
    """Registered names, sorted."""
    return sorted(_REGISTRY)


def is_registered(name: str) -> bool:
    """Whether ``name`` is a registered experiment."""
    return name in _REGISTRY


__all__ = [
    "register_experiment",
    "get_experiment",
    "list_experiments",
    "is_registered",
]
