"""
Base class of all experiments.

An experiment owns its configuration, prepares shared data once per
process, and turns a trial index into a :class:`TrialResult`. Step-loop
experiments only implement :meth:`build_world`, :meth:`apply` and
:meth:`observe`; the rest override :meth:`simulate`.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Any, ClassVar

import numpy as np

from polar_lab.constants import STANDARD_ERRORS
from polar_lab.errors import ConfigError, LabError
from polar_lab.experiments.models import (
    AcceptanceCheck,
    ExperimentConfig,
    ResultRow,
    TrialResult,
    TrialWorld,
)
from polar_lab.experiments.pipeline import build_trial_systems, run_steps
from polar_lab.experiments.stats import Aggregate
from polar_lab.functions.lattice import Lattice
from polar_lab.sampling.rng import setup_stream, trial_stream
from polar_lab.sampling.specs import SamplerSpec, spec_from_dict
from polar_lab.utils import logger

EXACT_AUDIT_TOL = 1e-12


class Experiment:
    """
    One named, seeded experiment.

    :cvar name (str): Registered name, set by the registry decorator.
    :cvar description (str): One-line summary for ``lab list``.
    :cvar columns (tuple[str, ...]): Observable columns, in CSV order.
    :cvar audit_columns (tuple[str, ...]): Columns audited for
        monotonicity within every trial.
    """

    name: ClassVar[str] = ""
    description: ClassVar[str] = ""
    columns: tuple[str, ...] = ()
    audit_columns: tuple[str, ...] = ()

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._prepared = False

    # Setup -----------------------------------------------------------

    def prepare(self) -> None:
        """Run :meth:`setup` once."""
        if not self._prepared:
            self.setup()
            self._prepared = True

    def setup(self) -> None:
        """Validate the config and build data shared by all trials."""

    def lattice(self) -> Lattice:
        """Lattice of grid runs."""
        return self.config.lattice()

    def setup_rng(self) -> np.random.Generator:
        """Stream for random initial data shared by all trials."""
        return setup_stream(self.config.seed)

    def sampler_spec(self) -> SamplerSpec:
        """
        Parsed sampler.

        :raises ConfigError: If the config has no valid sampler.
        """
        if not self.config.sampler:
            raise ConfigError(f"'{self.name}' needs a 'sampler' section")
        return spec_from_dict(self.config.sampler, self.config.d)

    def require_sampler(self, spec: SamplerSpec, *kinds: str) -> None:
        """
        :raises ConfigError: If ``spec`` is not one of ``kinds``.
        """
        if spec.kind not in kinds:
            raise ConfigError(
                f"'{self.name}' accepts samplers {', '.join(kinds)}, "
                f"got {spec.kind}"
            )

    def audit_tol(self) -> float:
        """Slack of the monotonicity audit."""
        return self.config.tolerance("audit", EXACT_AUDIT_TOL)

    # Trials ----------------------------------------------------------

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        """Initial state and parameter stream of a trial."""
        raise NotImplementedError

    def apply(self, state: Any, param: Any) -> Any:
        """One symmetrization step."""
        raise NotImplementedError

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        """Observables of the current state."""
        raise NotImplementedError

    def finish(self, world: TrialWorld) -> None:
        """Hook run after the last step (end-of-trial audits)."""

    def build_systems(self) -> tuple[object, ...]:
        """Ordered systems of one trial."""
        return build_trial_systems(
            apply=self.apply,
            observe=self.observe,
            audit_columns=self.audit_columns,
            audit_tol=self.audit_tol(),
            extra=self.extra_systems(),
        )

    def extra_systems(self) -> tuple[object, ...]:
        """Additional systems, such as per-step bound audits."""
        return ()

    def simulate(self, trial: int, rng: np.random.Generator) -> TrialResult:
        """Run the step loop of one trial."""
        world = self.build_world(trial, rng)
        run_steps(
            world,
            self.build_systems(),
            self.config.steps,
            self.config.record_steps(),
        )
        self.finish(world)
        return TrialResult(
            trial, world.rows, world.audits, extras=world.extras
        )

    def run_trial(self, trial: int) -> TrialResult:
        """
        Run one trial on its own stream.

        A :class:`LabError` aborts the trial and yields a single row
        carrying the error name; configuration errors propagate.
        """
        self.prepare()
        rng = trial_stream(self.config.seed, trial)
        started = time.perf_counter()
        try:
            result = self.simulate(trial, rng)
        except ConfigError:
            raise
        except LabError as exc:
            logger.warning(
                f"{self.name}: trial {trial} aborted: "
                f"{type(exc).__name__}: {exc}"
            )
            return TrialResult(
                trial,
                rows=[ResultRow(trial, 0, status=type(exc).__name__)],
                error=str(exc),
            )
        logger.debug(
            f"{self.name}: trial {trial} took "
            f"{time.perf_counter() - started:.3f}s"
        )
        return result

    # Reporting -------------------------------------------------------

    def acceptance(
        self, agg: Aggregate, results: list[TrialResult]
    ) -> list[AcceptanceCheck]:
        """Embedded acceptance checks."""
        del agg, results
        return []

    def report(self, results: list[TrialResult]) -> dict[str, Any]:
        """Extra entries for the run summary."""
        del results
        return {}

    def artifacts(self, out_dir: Path) -> dict[str, Path]:
        """Write extra files next to the results."""
        del out_dir
        return {}

    def chart_columns(self) -> tuple[str, ...]:
        """Columns drawn in the summary chart."""
        return self.columns


def bound_check(
    name: str,
    agg: Aggregate,
    column: str,
    bound,
    *,
    upper: bool = True,
    slack: float = 0.0,
    steps=None,
    k: float = STANDARD_ERRORS,
) -> AcceptanceCheck:
    """
    Check a per-step bound on the mean of ``column``.

    ``bound`` is a number, a callable of the step, or another column
    name. Upper bounds pass when ``mean - k se <= bound + slack``, lower
    bounds when ``mean + k se >= bound - slack``.
    """
    failures = []
    checked = 0
    for step, stats in agg.items():
        if steps is not None and step not in steps:
            continue
        if column not in stats:
            continue
        if isinstance(bound, str):
            target = stats[bound].mean
        elif callable(bound):
            target = float(bound(step))
        else:
            target = float(bound)
        checked += 1
        if upper:
            ok = stats[column].lower(k) <= target + slack
        else:
            ok = stats[column].upper(k) >= target - slack
        if not ok:
            failures.append(
                f"n={step}: mean={stats[column].mean:.6g} "
                f"se={stats[column].se:.3g} bound={target:.6g}"
            )
    if checked == 0:
        return AcceptanceCheck(name, False, f"no recorded {column}")
    if failures:
        shown = "; ".join(failures[:5])
        return AcceptanceCheck(
            name, False, f"{len(failures)}/{checked} steps fail: {shown}"
        )
    return AcceptanceCheck(name, True, f"{checked} steps within bound")


__all__ = ["Experiment", "bound_check", "EXACT_AUDIT_TOL"]
