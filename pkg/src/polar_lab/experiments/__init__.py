"""
Seeded Monte Carlo experiments.

Importing the package registers every experiment by name.
"""

from __future__ import annotations

from . import (
    audits,
    compact,
    lower,
    nonconv,
    orbit_density,
    polarization,
    steiner_rate,
)
from .base import Experiment, bound_check
from .models import (
    AcceptanceCheck,
    ExperimentConfig,
    ResultRow,
    RunSummary,
    TrialResult,
)
from .registry import get_experiment, list_experiments, register_experiment
from .runner import build_experiment, run_experiment, run_trials

__all__ = [
    "audits",
    "compact",
    "lower",
    "nonconv",
    "orbit_density",
    "polarization",
    "steiner_rate",
    "Experiment",
    "bound_check",
    "AcceptanceCheck",
    "ExperimentConfig",
    "ResultRow",
    "RunSummary",
    "TrialResult",
    "get_experiment",
    "list_experiments",
    "register_experiment",
    "build_experiment",
    "run_experiment",
    "run_trials",
]
