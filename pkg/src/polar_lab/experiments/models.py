"""
Experiment models: configuration, result rows, the per-trial world and
the tick context handed to systems.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable

import numpy as np

from polar_lab.errors import ConfigError
from polar_lab.experiments.registry import is_registered
from polar_lab.functions.lattice import Lattice
from polar_lab.operators.polarize import PolarizeMode
from polar_lab.sampling.rng import MAX_SEED

LOG_RECORD_POINTS = 30


class StepPhase(IntEnum):
    """Order in which systems run within one step."""

    DRAW = 10
    APPLY = 20
    OBSERVE = 30
    AUDIT = 40


def _positive_int(raw: dict[str, Any], key: str, default: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    if value < 1:
        raise ConfigError(f"'{key}' must be >= 1, got {value}")
    return value


def _mapping(raw: dict[str, Any], key: str) -> dict[str, Any]:
    value = raw.get(key, {}) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be an object")
    return dict(value)


# Justification: the config mirrors the JSON schema one field per key
# pylint: disable=too-many-instance-attributes
@dataclass(frozen=True)
class ExperimentConfig:
    """
    One experiment run as described by a JSON file.

    :ivar experiment (str): Registered experiment name.
    :ivar d (int): Dimension.
    :ivar trials (int): Number of independent trials.
    :ivar steps (int): Steps per trial (``n_max``).
    :ivar seed (int): 64-bit master seed.
    :ivar sampler (dict): Sampler spec payload.
    :ivar grid (dict): ``{"L": ..., "n_cells": ...}`` for grid runs.
    :ivar initial (dict): Initial data template.
    :ivar mode (str): Polarization mode for grid runs.
    :ivar record (Any): ``"all"``, ``"log"`` or a list of steps.
    :ivar params (dict): Experiment-specific parameters.
    :ivar tolerances (dict[str, float]): Tolerance overrides.
    :ivar output (dict): ``{"dir": ..., "prefix": ...}``.
    :ivar source (Path | None): File the config was read from.
    """

    experiment: str
    d: int
    trials: int = 1
    steps: int = 1
    seed: int = 0
    sampler: dict[str, Any] = field(default_factory=dict)
    grid: dict[str, Any] = field(default_factory=dict)
    initial: dict[str, Any] = field(default_factory=dict)
    mode: str = PolarizeMode.INTERP.value
    record: Any = "log"
    params: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    output: dict[str, Any] = field(default_factory=dict)
    source: Path | None = field(default=None, compare=False)

    @classmethod
    def from_dict(
        cls, raw: dict[str, Any], *, source: Path | None = None
    ) -> "ExperimentConfig":
        """
        Validate a parsed JSON payload.

        :raises ConfigError: Naming the first offending key.
        """
        if not isinstance(raw, dict):
            raise ConfigError("experiment config must be a JSON object")
        name = raw.get("experiment")
        if not isinstance(name, str) or not name:
            raise ConfigError("'experiment' must be a non-empty string")
        if not is_registered(name):
            raise ConfigError(f"'experiment': unknown experiment '{name}'")

        seed = raw.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"'seed' must be an integer, got {seed!r}")
        if not 0 <= seed <= MAX_SEED:
            raise ConfigError(f"'seed' must fit in 64 unsigned bits: {seed}")

        mode = str(raw.get("mode", PolarizeMode.INTERP.value))
        if mode not in {m.value for m in PolarizeMode}:
            raise ConfigError(
                f"'mode' must be interp or mirror-exact, got {mode}"
            )

        grid = _mapping(raw, "grid")
        if grid:
            try:
                if not float(grid["L"]) > 0:
                    raise ConfigError("'grid.L' must be > 0")
                if int(grid["n_cells"]) < 1:
                    raise ConfigError("'grid.n_cells' must be >= 1")
            except KeyError as exc:
                raise ConfigError(f"'grid' is missing {exc}") from exc
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"'grid': {exc}") from exc

        record = raw.get("record", "log")
        if isinstance(record, str):
            if record not in ("all", "log"):
                raise ConfigError("'record' must be all, log or a list")
        elif not isinstance(record, list) or not all(
            isinstance(s, int) and not isinstance(s, bool) and s >= 0
            for s in record
        ):
            raise ConfigError("'record' list must hold step numbers >= 0")

        tolerances = _mapping(raw, "tolerances")
        try:
            tolerances = {str(k): float(v) for k, v in tolerances.items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'tolerances': {exc}") from exc

        return cls(
            experiment=name,
            d=_positive_int(raw, "d", 2),
            trials=_positive_int(raw, "trials", 1),
            steps=_positive_int(raw, "steps", 1),
            seed=seed,
            sampler=_mapping(raw, "sampler"),
            grid=grid,
            initial=_mapping(raw, "initial"),
            mode=mode,
            record=record,
            params=_mapping(raw, "params"),
            tolerances=tolerances,
            output=_mapping(raw, "output"),
            source=source,
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        """
        Read and validate a JSON config file.

        :raises ConfigError: If the file is missing or malformed.
        """
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(raw, source=path)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready payload; ``from_dict(to_dict())`` is the identity."""
        payload = dataclasses.asdict(self)
        payload.pop("source")
        return payload

    def with_overrides(
        self,
        *,
        seed: int | None = None,
        output_dir: str | Path | None = None,
    ) -> "ExperimentConfig":
        """Copy with the CLI overrides applied."""
        changes: dict[str, Any] = {}
        if seed is not None:
            if not 0 <= int(seed) <= MAX_SEED:
                raise ConfigError(f"seed must fit in 64 bits, got {seed}")
            changes["seed"] = int(seed)
        if output_dir is not None:
            changes["output"] = {**self.output, "dir": str(output_dir)}
        return dataclasses.replace(self, **changes) if changes else self

    @property
    def prefix(self) -> str:
        """Stem of the output files."""
        return str(self.output.get("prefix") or self.experiment)

    def lattice(self) -> Lattice:
        """
        Lattice described by ``grid``.

        :raises ConfigError: If the config has no grid.
        """
        if not self.grid:
            raise ConfigError(f"'{self.experiment}' needs a 'grid' section")
        return Lattice(
            d=self.d,
            L=float(self.grid["L"]),
            n_cells=int(self.grid["n_cells"]),
        )

    def record_steps(self) -> tuple[int, ...]:
        """Steps at which observables are recorded, always including 0."""
        if self.record == "all":
            steps = range(self.steps + 1)
        elif self.record == "log":
            count = min(self.steps, LOG_RECORD_POINTS)
            spaced = np.geomspace(1, self.steps, count)
            steps = [0, self.steps, *np.unique(np.rint(spaced).astype(int))]
        else:
            steps = [0, *self.record]
        return tuple(sorted({int(s) for s in steps if 0 <= s <= self.steps}))

    def param(self, key: str, default: Any = None) -> Any:
        """Experiment-specific parameter."""
        return self.params.get(key, default)

    def tolerance(self, key: str, default: float) -> float:
        """Tolerance override, falling back to ``default``."""
        return float(self.tolerances.get(key, default))


# pylint: enable=too-many-instance-attributes


@dataclass
class ResultRow:
    """
    Observables of one trial at one recorded step.

    :ivar trial (int): Trial index.
    :ivar step (int): Step ``n`` (0 is the initial state).
    :ivar values (dict[str, float]): Observable values by column.
    :ivar status (str): ``ok`` or the name of the error that aborted the
        trial.
    """

    trial: int
    step: int
    values: dict[str, float] = field(default_factory=dict)
    status: str = "ok"

    def __post_init__(self):
        for key, value in self.values.items():
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"observable {key}={value} must be >= 0")

    @property
    def aborted(self) -> bool:
        """Whether this row marks an aborted trial."""
        return self.status != "ok"


@dataclass
class TrialResult:
    """
    Everything one trial produced.

    :ivar trial (int): Trial index.
    :ivar rows (list[ResultRow]): Recorded rows in step order.
    :ivar audits (dict[str, bool]): Named in-trial audits and outcomes.
    :ivar error (str | None): Message of the aborting error, if any.
    :ivar extras (dict[str, Any]): Picklable per-trial details for the
        report.
    """

    trial: int
    rows: list[ResultRow] = field(default_factory=list)
    audits: dict[str, bool] = field(default_factory=dict)
    error: str | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def aborted(self) -> bool:
        """Whether the trial ended with an error."""
        return self.error is not None


@dataclass(frozen=True)
class AcceptanceCheck:
    """
    Outcome of one embedded acceptance check.

    :ivar name (str): Short identifier.
    :ivar passed (bool): Outcome.
    :ivar detail (str): Human-readable numbers behind the outcome.
    """

    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class RunSummary:
    """
    Result of :func:`polar_lab.experiments.runner.run_experiment`.

    :ivar experiment (str): Experiment name.
    :ivar trials (int): Trials run.
    :ivar aborted (int): Trials aborted by an error.
    :ivar checks (list[AcceptanceCheck]): Acceptance outcomes.
    :ivar paths (dict[str, Path]): Files written, by kind.
    :ivar extras (dict[str, Any]): Experiment-specific report entries.
    """

    experiment: str
    trials: int
    aborted: int = 0
    checks: list[AcceptanceCheck] = field(default_factory=list)
    paths: dict[str, Path] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """All checks passed and no trial aborted."""
        return self.aborted == 0 and all(c.passed for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "experiment": self.experiment,
            "passed": self.passed,
            "trials": self.trials,
            "aborted": self.aborted,
            "checks": [c.to_dict() for c in self.checks],
            "extras": self.extras,
        }


@dataclass
class TrialWorld:
    """
    Mutable state of one trial.

    :ivar trial (int): Trial index.
    :ivar state (Any): Current function, set, cone or ellipsoid matrix.
    :ivar stream (Any): Parameter stream with ``draw(i, state)``.
    :ivar feedback (Callable | None): Maps ``state`` to what a feedback
        stream reads (cone apex, ellipsoid matrix).
    :ivar rows (list[ResultRow]): Rows recorded so far.
    :ivar audits (dict[str, bool]): Audit outcomes so far.
    :ivar last (dict[str, float]): Previously recorded values.
    :ivar extras (dict[str, Any]): Experiment-owned scratch space.
    """

    trial: int
    state: Any
    stream: Any = None
    feedback: Callable[[Any], Any] | None = None
    rows: list[ResultRow] = field(default_factory=list)
    audits: dict[str, bool] = field(default_factory=dict)
    last: dict[str, float] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    def feedback_state(self) -> Any:
        """What a feedback stream sees of the current state."""
        return self.feedback(self.state) if self.feedback else None

    def fail_audit(self, name: str) -> None:
        """Mark an audit as violated."""
        self.audits[name] = False

    def pass_audit(self, name: str) -> None:
        """Mark an audit as passed unless it already failed."""
        self.audits.setdefault(name, True)


@dataclass
class TrialTickContext:
    """
    Context for one step of a trial.

    :ivar world (TrialWorld): Trial state.
    :ivar step (int): Step index ``i`` (1-based; 0 for the initial state).
    :ivar param (Any): Parameter drawn for this step.
    :ivar record (bool): Whether observables are recorded at this step.
    """

    world: TrialWorld
    step: int
    param: Any = None
    record: bool = False


__all__ = [
    "StepPhase",
    "ExperimentConfig",
    "ResultRow",
    "TrialResult",
    "AcceptanceCheck",
    "RunSummary",
    "TrialWorld",
    "TrialTickContext",
]
