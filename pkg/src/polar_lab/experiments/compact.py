"""
Compact sets under random polarizations, tracked in Hausdorff distance.
"""

from __future__ import annotations

from typing import Any

from polar_lab.errors import ConfigError
from polar_lab.experiments.base import bound_check
from polar_lab.experiments.models import AcceptanceCheck, TrialWorld
from polar_lab.experiments.polarization import LevelSetPolarization
from polar_lab.experiments.registry import register_experiment
from polar_lab.functions.grid import sup_distance
from polar_lab.functions.shapes import perimeter
from polar_lab.geometry import sphere_area
from polar_lab.metrics import hausdorff, parallel_radius

RADII_CONSTANT = 10.0
RADII_SLACK_FACTOR = 2.0
HAUSDORFF_CELLS = 4.0


@register_experiment("compact-hausdorff")
class CompactHausdorff(LevelSetPolarization):
    """
    ``d_H(K_n, K*)`` and ``d_H(dK_n, dK*)`` for a compact set, with the
    boundary distance compared to
    ``10 radius(K*) Per(K) / Per(K*) n^(-1/(d+1))``.
    """

    description = "Hausdorff convergence of K_n to the centered ball K*"
    columns = ("hausdorff", "boundary_hausdorff", "sup_dist", "radii_bound")
    audit_columns = ("sup_dist",)

    def setup(self) -> None:
        super().setup()
        d = self.config.d
        self.per = perimeter(self.config.initial, d)
        if self.per is None:
            raise ConfigError("set template needs a known 'perimeter'")
        self.radius = parallel_radius(self.shape, 0.0)
        self.per_star = sphere_area(d) * self.radius ** (d - 1)
        self.star_boundary = self.shape_star.boundary()

    def radii_bound(self, n: int) -> float:
        """Boundary-distance target after ``n`` steps."""
        d = self.config.d
        return (
            RADII_CONSTANT
            * self.radius
            * self.per
            / self.per_star
            * max(n, 1) ** (-1.0 / (d + 1))
        )

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        current = self.current_set(world)
        return {
            "hausdorff": hausdorff(current, self.shape_star),
            "boundary_hausdorff": hausdorff(
                current.boundary(), self.star_boundary
            ),
            "sup_dist": sup_distance(world.state, self.target),
            "radii_bound": self.radii_bound(step),
        }

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        limit = HAUSDORFF_CELLS * self.grid.h
        checks = []
        for column in ("hausdorff", "boundary_hausdorff"):
            means = [
                (s[column].mean, n) for n, s in agg.items() if column in s
            ]
            if not means:
                checks.append(AcceptanceCheck(column, False, "no rows"))
                continue
            best, step = min(means)
            checks.append(
                AcceptanceCheck(
                    f"{column}-below-4h",
                    best < limit,
                    f"min mean {best:.6g} at n={step} (4h={limit:.6g})",
                )
            )
        bound = self.radii_bound
        checks.append(
            bound_check(
                "radii-rate",
                agg,
                "boundary_hausdorff",
                lambda n: RADII_SLACK_FACTOR * bound(n),
                slack=limit,
                steps={n for n in agg if n >= 1},
            )
        )
        checks.extend(self.raster_checks())
        return checks

    def report(self, results) -> dict[str, Any]:
        return {
            "radius_star": self.radius,
            "perimeter": self.per,
            "perimeter_star": self.per_star,
        }


__all__ = ["CompactHausdorff"]
