"""
Deterministic and Monte Carlo audits of sampler properties: divergence
of the schedule lower bounds and moments of uniform directions.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from polar_lab.constants import STANDARD_ERRORS
from polar_lab.errors import ConfigError
from polar_lab.experiments.base import Experiment
from polar_lab.experiments.models import (
    AcceptanceCheck,
    ResultRow,
    TrialResult,
)
from polar_lab.experiments.registry import register_experiment
from polar_lab.geometry import random_directions
from polar_lab.sampling.divergence import DivergenceAudit, divergence_audit
from polar_lab.sampling.specs import spec_from_dict

DEFAULT_THRESHOLD = 10.0
DEFAULT_MOMENT_DRAWS = 1_000_000
MOMENT_CHUNK = 100_000


@register_experiment("divergence-audit")
class DivergenceAudits(Experiment):
    """
    Partial sums of the lower-bound terms of sampler schedules; trial
    ``k`` audits family ``k`` of ``params.families``.
    """

    description = "partial sums of schedule lower bounds grow without bound"
    columns = ("term", "partial_sum")

    def setup(self) -> None:
        families = self.config.param("families")
        if not families or not isinstance(families, list):
            raise ConfigError("'divergence-audit' needs 'params.families'")
        if len(families) != self.config.trials:
            raise ConfigError(
                f"'trials' must equal the number of families "
                f"({len(families)})"
            )
        d = self.config.d
        self.families = []
        for entry in families:
            try:
                self.families.append(
                    {
                        "spec": spec_from_dict(entry["sampler"], d),
                        "rho": float(entry.get("rho", 1.0)),
                        "L": float(entry.get("L", 1.0)),
                        "N": int(entry["N"]),
                        "threshold": float(
                            entry.get("threshold", DEFAULT_THRESHOLD)
                        ),
                    }
                )
            except KeyError as exc:
                raise ConfigError(f"family is missing {exc}") from exc

    def audit(self, k: int) -> DivergenceAudit:
        """Audit of family ``k``."""
        family = self.families[k]
        return divergence_audit(
            family["spec"], family["rho"], family["L"], family["N"]
        )

    def simulate(self, trial: int, rng: np.random.Generator) -> TrialResult:
        del rng
        audit = self.audit(trial)
        n_max = len(audit.partial_sums)
        marks = np.unique(
            np.geomspace(1, n_max, num=min(n_max, 60)).astype(int)
        )
        rows = [
            ResultRow(
                trial,
                int(n),
                {
                    "term": float(audit.terms[n - 1]),
                    "partial_sum": float(audit.partial_sums[n - 1]),
                },
            )
            for n in marks
        ]
        return TrialResult(trial, rows, {"monotone-sums": audit.monotone})

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        checks = []
        for k, family in enumerate(self.families):
            audit = self.audit(k)
            first = audit.first_exceeding(family["threshold"])
            if first is None:
                detail = (
                    f"partial sum {audit.partial_sums[-1]:.6g} after "
                    f"{family['N']} terms"
                )
            else:
                detail = f"exceeds {family['threshold']:g} at N={first}"
            checks.append(
                AcceptanceCheck(
                    f"{audit.family}[{k}]-diverges", first is not None, detail
                )
            )
        return checks

    def report(self, results) -> dict[str, Any]:
        out = []
        for k, family in enumerate(self.families):
            audit = self.audit(k)
            out.append(
                {
                    "family": audit.family,
                    "threshold": family["threshold"],
                    "first_N": audit.first_exceeding(family["threshold"]),
                    "final_sum": float(audit.partial_sums[-1]),
                    "growth": audit.growth(),
                }
            )
        return {"families": out}


@register_experiment("sphere-moments")
class SphereMoments(Experiment):
    """
    ``E <U, v>^2 = 1/d`` and ``E <U, v>^4 = 3 / (d (d + 2))`` for uniform
    ``U``; trial ``k`` runs dimension ``params.dims[k]``.
    """

    description = "second and fourth moments of uniform directions"
    columns = ("d", "m2", "m2_se", "m4", "m4_se")

    def setup(self) -> None:
        dims = self.config.param("dims", [self.config.d])
        self.dims = [int(d) for d in dims]
        if len(self.dims) != self.config.trials:
            raise ConfigError(
                f"'trials' must equal the number of dims ({len(self.dims)})"
            )
        if any(d < 1 for d in self.dims):
            raise ConfigError("'dims' must be positive")
        self.draws = int(self.config.param("draws", DEFAULT_MOMENT_DRAWS))

    def simulate(self, trial: int, rng: np.random.Generator) -> TrialResult:
        d = self.dims[trial]
        v = np.zeros(d)
        v[0] = 1.0
        sums = np.zeros(4)
        remaining = self.draws
        while remaining > 0:
            count = min(remaining, MOMENT_CHUNK)
            t2 = (random_directions(rng, count, d) @ v) ** 2
            t4 = t2 * t2
            sums += (t2.sum(), (t2 * t2).sum(), t4.sum(), (t4 * t4).sum())
            remaining -= count
        n = float(self.draws)
        m2, m4 = sums[0] / n, sums[2] / n
        se2 = np.sqrt(max(sums[1] / n - m2 * m2, 0.0) / (n - 1.0))
        se4 = np.sqrt(max(sums[3] / n - m4 * m4, 0.0) / (n - 1.0))
        row = ResultRow(
            trial,
            0,
            {
                "d": float(d),
                "m2": float(m2),
                "m2_se": float(se2),
                "m4": float(m4),
                "m4_se": float(se4),
            },
        )
        return TrialResult(trial, [row])

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        checks = []
        for result in results:
            if result.aborted or not result.rows:
                continue
            values = result.rows[0].values
            d = int(values["d"])
            for name, exact in (
                ("m2", 1.0 / d),
                ("m4", 3.0 / (d * (d + 2))),
            ):
                err = abs(values[name] - exact)
                limit = STANDARD_ERRORS * values[f"{name}_se"]
                checks.append(
                    AcceptanceCheck(
                        f"{name}-d{d}",
                        err <= limit,
                        f"{values[name]:.6g} vs {exact:.6g} "
                        f"(3 se = {limit:.3g})",
                    )
                )
        return checks


__all__ = ["DivergenceAudits", "SphereMoments"]
