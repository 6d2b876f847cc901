"""
Feedback sequences that are dense yet never symmetrize: a cone whose apex
stays put and an ellipsoid whose eigenvalue gap stays open.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from polar_lab.eigen import eigen_gap
from polar_lab.errors import ConfigError
from polar_lab.experiments.base import Experiment
from polar_lab.experiments.models import AcceptanceCheck, TrialWorld
from polar_lab.experiments.registry import register_experiment
from polar_lab.experiments.systems import BoundAuditSystem
from polar_lab.functions.shapes import build_cone, build_ellipsoid
from polar_lab.operators.polarize import polarize_cone
from polar_lab.operators.steiner import steiner_ellipsoid
from polar_lab.sampling.specs import AdversarialCone, AdversarialSteiner
from polar_lab.sampling.streams import build_stream

BOUND_AUDIT = "bound"
SUBSEQUENCE_AUDIT = "base-subsequence"
GAP_AUDIT_TOL = 1e-9


def _audit_subsequence(world: TrialWorld, same) -> None:
    sampler = world.stream
    for k, pos in enumerate(sampler.base_positions(), start=1):
        if not same(sampler.emitted[pos - 1], sampler.base_item(k)):
            world.fail_audit(SUBSEQUENCE_AUDIT)
            return
    world.pass_audit(SUBSEQUENCE_AUDIT)
    world.extras["base_items"] = len(sampler.base_positions())


@register_experiment("nonconv-cone")
class NonConvergenceCone(Experiment):
    """``|a_n| >= |a_0| - epsilon`` along the adversarial cone rule."""

    description = "adversarial polarizations keep the cone apex away"
    columns = ("apex_norm",)

    def setup(self) -> None:
        template = self.config.initial
        if str(template.get("kind", "")).lower() != "cone":
            raise ConfigError("'nonconv-cone' needs an initial cone")
        self.cone = build_cone(template, self.config.d)
        self.spec = self.sampler_spec()
        self.require_sampler(self.spec, AdversarialCone.kind)
        self.floor = self.cone.apex_norm - self.spec.epsilon

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        return TrialWorld(
            trial,
            self.cone,
            build_stream(self.spec, rng),
            feedback=lambda cone: cone.apex,
        )

    def apply(self, state: Any, param: Any) -> Any:
        return polarize_cone(state, param)

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        return {"apex_norm": world.state.apex_norm}

    def extra_systems(self) -> tuple[object, ...]:
        floor = self.floor
        return (
            BoundAuditSystem(
                BOUND_AUDIT,
                value=lambda cone: cone.apex_norm,
                bound=lambda n: floor,
                tol=self.audit_tol(),
            ),
        )

    def finish(self, world: TrialWorld) -> None:
        _audit_subsequence(
            world,
            lambda a, b: a.r == b.r and np.array_equal(a.u, b.u),
        )

    def report(self, results) -> dict[str, Any]:
        return {"apex_floor": self.floor, "epsilon": self.spec.epsilon}


@register_experiment("nonconv-steiner")
class NonConvergenceSteiner(Experiment):
    """
    Eigenvalue gap of an ellipsoid along the adversarial Steiner walk,
    against ``gap_0 prod_{k <= n} (1 - (C + 2) sin^2(epsilon / k))``.
    """

    description = "adversarial Steiner directions keep the eigen gap open"
    columns = ("eigen_gap", "gap_bound")

    def setup(self) -> None:
        template = self.config.initial
        if str(template.get("kind", "")).lower() != "ellipsoid":
            raise ConfigError("'nonconv-steiner' needs an initial ellipsoid")
        self.ellipsoid = build_ellipsoid(template, self.config.d)
        self.spec = self.sampler_spec()
        self.require_sampler(self.spec, AdversarialSteiner.kind)
        gap = self.ellipsoid.eigen_gap()
        self.c = 1.0 + gap.lam_max / gap.lam_min
        k = np.arange(1, self.config.steps + 1, dtype=float)
        factors = 1.0 - (self.c + 2.0) * np.sin(self.spec.epsilon / k) ** 2
        self.bounds = gap.gap * np.concatenate(([1.0], np.cumprod(factors)))

    def gap_bound(self, n: int) -> float:
        """Guaranteed gap after ``n`` steps."""
        return float(self.bounds[n])

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        return TrialWorld(
            trial,
            self.ellipsoid.M,
            build_stream(self.spec, rng),
            feedback=lambda matrix: matrix,
        )

    def apply(self, state: Any, param: Any) -> Any:
        return steiner_ellipsoid(state, param)

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        return {
            "eigen_gap": eigen_gap(world.state).gap,
            "gap_bound": self.gap_bound(step),
        }

    def extra_systems(self) -> tuple[object, ...]:
        return (
            BoundAuditSystem(
                BOUND_AUDIT,
                value=lambda matrix: eigen_gap(matrix).gap,
                bound=self.gap_bound,
                tol=self.config.tolerance("gap", GAP_AUDIT_TOL),
            ),
        )

    def finish(self, world: TrialWorld) -> None:
        _audit_subsequence(world, np.array_equal)

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        final = self.gap_bound(self.config.steps)
        return [
            AcceptanceCheck(
                "gap-bound-positive",
                final > 0.0,
                f"gap bound after {self.config.steps} steps is {final:.6g}",
            )
        ]

    def report(self, results) -> dict[str, Any]:
        served = [r.extras.get("base_items", 0) for r in results]
        return {
            "C": self.c,
            "precondition": (self.c + 2.0)
            * math.sin(self.spec.epsilon) ** 2,
            "final_gap_bound": self.gap_bound(self.config.steps),
            "base_items_served": served,
        }


__all__ = ["NonConvergenceCone", "NonConvergenceSteiner"]
