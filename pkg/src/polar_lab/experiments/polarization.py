"""
Random polarization of grid functions and sets: convergence, rates and
the symmetric-difference recursion.

Sets are polarized through the auxiliary distance function ``f_K``,
whose level set above ``h_offset`` is ``K``; the set after ``n`` steps
is the same level set of ``F_n``.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from polar_lab.errors import ConfigError
from polar_lab.experiments.base import Experiment, bound_check
from polar_lab.experiments.models import AcceptanceCheck, TrialWorld
from polar_lab.experiments.registry import register_experiment
from polar_lab.functions.grid import (
    GridFunction,
    l1_distance,
    level_set,
    sdr_grid,
    sup_distance,
)
from polar_lab.functions.shapes import (
    SET_BUILDERS,
    build_grid,
    build_set,
    perimeter,
    volume,
)
from polar_lab.geometry import ball_volume, sphere_area
from polar_lab.metrics import (
    I_functional,
    aux_distance_function,
    symm_diff_volume,
)
from polar_lab.operators.polarize import PolarizeMode, polarize_grid
from polar_lab.orbits import DirectionSet, positively_spans
from polar_lab.sampling.specs import DIRECTION_KINDS, FiniteIID, UniformPolar
from polar_lab.sampling.streams import build_stream

DEFAULT_GRID_ALLOWANCE = 2.0


def rate_constant(d: int, L: float) -> float:
    """``2 d m(B_{2L})``."""
    return 2.0 * d * ball_volume(d, 2.0 * L)


def symm_diff_bound(n: int, d: int, L: float) -> float:
    """``2 d m(B_{2L}) / (n + d 2^(d+1))``."""
    return rate_constant(d, L) / (n + d * 2 ** (d + 1))


def holder_bound(n: int, d: int, L: float, c: float, alpha: float) -> float:
    """``10 c L^alpha n^(-alpha / (d + alpha))``, ``n >= 1``."""
    return 10.0 * c * L**alpha * max(n, 1) ** (-alpha / (d + alpha))


def recursion_bound(z0: float, n: int) -> float:
    """``n``-fold iterate of ``z -> z (1 - z)`` from ``z0``."""
    z = z0
    for _ in range(n):
        z = z * (1.0 - z)
    return z


class PolarizationExperiment(Experiment):
    """Grid function under i.i.d. polarizations."""

    def setup(self) -> None:
        self.grid = self.lattice()
        self.mode = PolarizeMode(self.config.mode)
        self.spec = self.sampler_spec()
        if self.spec.kind in DIRECTION_KINDS:
            raise ConfigError(
                f"'{self.name}' needs a polar sampler, got {self.spec.kind}"
            )
        if isinstance(self.spec, FiniteIID):
            self.require_positive_span(self.spec)
        self.initial = self.build_initial()
        self.target = sdr_grid(self.initial)

    def require_positive_span(self, spec: FiniteIID) -> None:
        """
        :raises ConfigError: If the directions drawn with positive weight
            leave a cone of the sphere that no fold moves.
        """
        directions = spec.direction_array()
        if spec.weights:
            directions = directions[np.asarray(spec.weights) > 0]
        try:
            spanning = positively_spans(DirectionSet(directions))
        except ValueError as exc:
            raise ConfigError(f"direction set: {exc}") from exc
        if not spanning:
            raise ConfigError(
                f"'{self.name}' needs finite directions that positively "
                f"span R^{self.config.d}; every fold fixes the cone where "
                "<x, u> <= 0 for all of them"
            )

    def build_initial(self) -> GridFunction:
        """Initial grid function ``f``."""
        if not self.config.initial:
            raise ConfigError(f"'{self.name}' needs an 'initial' template")
        return build_grid(self.config.initial, self.grid, self.setup_rng())

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        return TrialWorld(trial, self.initial, build_stream(self.spec, rng))

    def apply(self, state: Any, param: Any) -> Any:
        return polarize_grid(state, param, self.mode)

    def audit_tol(self) -> float:
        if self.mode is PolarizeMode.INTERP:
            return self.config.tolerance("audit", self.grid.h)
        return super().audit_tol()

    def grid_allowance(self) -> float:
        """``O(h)`` allowance for interpolated runs."""
        factor = self.config.tolerance(
            "grid_allowance", DEFAULT_GRID_ALLOWANCE
        )
        return factor * self.grid.h


@register_experiment("conv-polar")
class ConvergencePolarization(PolarizationExperiment):
    """Sup and L1 distance to ``f*`` along a random polarization sequence."""

    description = "||F_n - f*|| along i.i.d. polarizations"
    columns = ("sup_dist", "l1_dist", "I_value")
    audit_columns = ("sup_dist", "I_value")

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        f = world.state
        return {
            "sup_dist": sup_distance(f, self.target),
            "l1_dist": l1_distance(f, self.target),
            "I_value": I_functional(f),
        }

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        threshold = self.config.param("threshold")
        if threshold is None:
            return []
        best = min(
            (stats["sup_dist"].mean, step)
            for step, stats in agg.items()
            if "sup_dist" in stats
        )
        return [
            AcceptanceCheck(
                "sup-dist-below-threshold",
                best[0] < float(threshold),
                f"min mean sup distance {best[0]:.6g} at n={best[1]} "
                f"(threshold {threshold})",
            )
        ]


class LevelSetPolarization(PolarizationExperiment):
    """Set runs through the auxiliary distance function."""

    def build_initial(self) -> GridFunction:
        if not self.config.initial:
            raise ConfigError(f"'{self.name}' needs an 'initial' template")
        self.shape = build_set(
            self.config.initial, self.grid, self.setup_rng()
        )
        self.h_offset = float(self.config.param("h_offset", self.grid.h))
        return aux_distance_function(self.shape, self.h_offset)

    def setup(self) -> None:
        super().setup()
        self.shape_star = level_set(self.target, self.h_offset)

    def current_set(self, world: TrialWorld):
        """``K_n`` of the trial."""
        return level_set(world.state, self.h_offset)

    def raster_checks(self) -> list[AcceptanceCheck]:
        """Cell volume of ``K`` against the exact volume of its template."""
        exact = volume(self.config.initial, self.config.d)
        per = perimeter(self.config.initial, self.config.d)
        if exact is None or per is None:
            return []
        error = abs(self.shape.volume - exact)
        limit = 5.0 * self.grid.h * per
        return [
            AcceptanceCheck(
                "raster-volume",
                error <= limit,
                f"cells {self.shape.volume:.6g}, exact {exact:.6g}, "
                f"limit 5 h Per = {limit:.3g}",
            )
        ]


@register_experiment("rate-uniform")
class RateUniform(LevelSetPolarization):
    """
    Rates under uniform polarizations: ``E m(A_n xor A*)`` for sets, L1
    and Hoelder rates for functions.
    """

    description = "rate bounds under uniform polarizations"

    def setup(self) -> None:
        kind = str(self.config.initial.get("kind", "")).lower()
        default = "set" if kind in SET_BUILDERS else "function"
        self.variant = str(self.config.param("variant", default))
        if self.variant not in ("set", "function"):
            raise ConfigError("'variant' must be set or function")
        if self.variant == "set":
            LevelSetPolarization.setup(self)
            self.columns = ("symm_diff", "bound")
            self.audit_columns = ("symm_diff",)
            self.per = perimeter(self.config.initial, self.config.d)
            if self.per is None:
                raise ConfigError("set template needs a known 'perimeter'")
        else:
            PolarizationExperiment.setup(self)
            self.columns = ("sup_dist", "l1_dist", "l1_bound", "holder_bound")
            self.audit_columns = ("sup_dist",)
        self.require_sampler(self.spec, UniformPolar.kind)

    def build_initial(self) -> GridFunction:
        if self.variant == "set":
            return LevelSetPolarization.build_initial(self)
        return PolarizationExperiment.build_initial(self)

    def set_bound(self, n: int) -> float:
        """Symmetric-difference bound plus the ``5 h Per(A)`` allowance."""
        allowance = 5.0 * self.grid.h * self.per
        return symm_diff_bound(n, self.config.d, self.spec.L) + allowance

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        d = self.config.d
        if self.variant == "set":
            current = self.current_set(world)
            return {
                "symm_diff": symm_diff_volume(current, self.shape_star),
                "bound": self.set_bound(step),
            }
        f = world.state
        c = float(self.config.param("holder_c", 1.0))
        alpha = float(self.config.param("holder_alpha", 1.0))
        return {
            "sup_dist": sup_distance(f, self.target),
            "l1_dist": l1_distance(f, self.target),
            "l1_bound": self.initial.sup
            * symm_diff_bound(step, d, self.spec.L),
            "holder_bound": holder_bound(step, d, self.spec.L, c, alpha),
        }

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        if self.variant == "set":
            return [
                bound_check("symm-diff-rate", agg, "symm_diff", "bound")
            ] + self.raster_checks()
        d = self.config.d
        sup_slack = self.grid_allowance()
        l1_slack = (
            sup_slack
            * self.initial.sup
            * sphere_area(d)
            * self.grid.L ** (d - 1)
        )
        positive = {s for s in agg if s >= 1}
        return [
            bound_check(
                "l1-rate", agg, "l1_dist", "l1_bound", slack=l1_slack
            ),
            bound_check(
                "holder-rate",
                agg,
                "sup_dist",
                "holder_bound",
                slack=sup_slack,
                steps=positive,
            ),
        ]


@register_experiment("recursion-audit")
class RecursionAudit(LevelSetPolarization):
    """
    ``z_n = E m(A_n xor A*) / (2 d m(B_{2L}))`` against the recursion
    ``z_n <= z_{n-1} (1 - z_{n-1})``.
    """

    description = "z_n <= z_{n-1}(1 - z_{n-1}) for uniform polarizations"
    columns = ("symm_diff", "z")
    audit_columns = ("symm_diff",)

    def setup(self) -> None:
        super().setup()
        self.require_sampler(self.spec, UniformPolar.kind)
        self.scale = rate_constant(self.config.d, self.spec.L)
        per = perimeter(self.config.initial, self.config.d)
        # grid error of m(A_n xor A*) is O(h Per)
        self.slack = 0.0 if per is None else 5.0 * self.grid.h * per
        self.slack /= self.scale

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        value = symm_diff_volume(self.current_set(world), self.shape_star)
        return {"symm_diff": value, "z": value / self.scale}

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        d = self.config.d
        z0_limit = 1.0 / (d * 2 ** (d + 1))
        steps = [s for s in agg if "z" in agg[s]]
        checks = []
        if 0 in agg:
            z0 = agg[0]["z"].mean
            checks.append(
                AcceptanceCheck(
                    "initial-z",
                    z0 <= z0_limit + self.slack,
                    f"z_0={z0:.6g}, limit 1/(d 2^(d+1))={z0_limit:.6g}",
                )
            )
        failures = []
        for prev, step in zip(steps, steps[1:]):
            z = recursion_bound(min(agg[prev]["z"].upper(), 0.5), step - prev)
            if agg[step]["z"].lower() > z + self.slack:
                failures.append(
                    f"n={step}: z={agg[step]['z'].mean:.6g} > {z:.6g}"
                )
        checks.append(
            AcceptanceCheck(
                "z-recursion",
                not failures,
                "; ".join(failures[:5])
                or f"{len(steps) - 1} transitions satisfy the recursion",
            )
        )
        checks.extend(self.raster_checks())
        return checks

    def report(self, results) -> dict[str, Any]:
        return {"scale": self.scale, "z_slack": self.slack}


__all__ = [
    "ConvergencePolarization",
    "RateUniform",
    "RecursionAudit",
    "rate_constant",
    "symm_diff_bound",
    "holder_bound",
    "recursion_bound",
]
