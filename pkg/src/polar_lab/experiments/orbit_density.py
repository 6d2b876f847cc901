"""
Orbits of a point of the sphere under the folding maps of a finite
direction set, and how densely they cover the sphere.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np

from polar_lab.errors import ConfigError
from polar_lab.experiments.base import Experiment
from polar_lab.experiments.models import (
    AcceptanceCheck,
    ResultRow,
    TrialResult,
)
from polar_lab.experiments.registry import register_experiment
from polar_lab.geometry import as_direction, random_direction
from polar_lab.orbits import (
    DEFAULT_PROBES,
    DirectionSet,
    covering_radius,
    generating_heuristics,
    orbit_expand,
    write_orbit_csv,
)
from polar_lab.sampling.rng import trial_stream

DEFAULT_BUDGETS = (100, 1_000, 10_000)
DEFAULT_Q = 10_000
UNIT_NORM_TOL = 1e-9


@register_experiment("orbit-density")
class OrbitDensity(Experiment):
    """
    Orbit size and covering radius of orbit prefixes, one row per budget.
    """

    description = "covering radius of folding-map orbits on the sphere"
    columns = ("orbit_size", "covering_radius")

    def setup(self) -> None:
        params = self.config.params
        try:
            if "angles" in params:
                self.G = DirectionSet.from_angles(params["angles"])
            elif "directions" in params:
                self.G = DirectionSet(np.asarray(params["directions"]))
            else:
                raise ConfigError(
                    "'orbit-density' needs 'directions' or 'angles'"
                )
        except ValueError as exc:
            raise ConfigError(f"direction set: {exc}") from exc
        if self.G.dimension != self.config.d:
            raise ConfigError(
                f"directions are {self.G.dimension}-dimensional, "
                f"d={self.config.d}"
            )
        budgets = params.get("budgets", DEFAULT_BUDGETS)
        self.budgets = tuple(sorted(int(b) for b in budgets))
        if not self.budgets or self.budgets[0] < 1:
            raise ConfigError("'budgets' must be positive integers")
        self.probes = int(params.get("probes", DEFAULT_PROBES))
        self.start = params.get("x")
        if self.start is not None:
            self.start = as_direction(self.start)
        self.generating = generating_heuristics(
            self.G, int(params.get("Q", DEFAULT_Q))
        )

    def orbit(self, trial: int, rng: np.random.Generator) -> np.ndarray:
        """Orbit of the trial's starting point at the largest budget."""
        del trial
        if self.start is not None:
            x = self.start
        else:
            x = random_direction(rng, self.config.d)
        return orbit_expand(self.G, x, self.budgets[-1])

    def simulate(self, trial: int, rng: np.random.Generator) -> TrialResult:
        points = self.orbit(trial, rng)
        rows = []
        for budget in self.budgets:
            prefix = points[:budget]
            rows.append(
                ResultRow(
                    trial,
                    budget,
                    {
                        "orbit_size": float(len(prefix)),
                        "covering_radius": covering_radius(
                            prefix, self.probes
                        ),
                    },
                )
            )
        norms = np.linalg.norm(points, axis=1)
        unit = bool(np.all(np.abs(norms - 1.0) <= UNIT_NORM_TOL))
        return TrialResult(trial, rows, {"unit-norm": unit})

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        threshold = self.config.param("threshold")
        if threshold is None:
            return []
        stats = agg.get(self.budgets[-1], {}).get("covering_radius")
        if stats is None:
            return [AcceptanceCheck("covering-radius", False, "no rows")]
        return [
            AcceptanceCheck(
                "covering-radius",
                stats.mean < float(threshold),
                f"mean covering radius {stats.mean:.6g} at budget "
                f"{self.budgets[-1]} (threshold {threshold})",
            )
        ]

    def report(self, results) -> dict[str, Any]:
        return {"generating": self.generating.to_dict()}

    def artifacts(self, out_dir: Path) -> dict[str, Path]:
        points = self.orbit(0, trial_stream(self.config.seed, 0))
        path = out_dir / f"{self.config.prefix}_orbit.csv"
        return {"orbit": write_orbit_csv(points, path)}


__all__ = ["OrbitDensity"]
