"""
Lower bounds on the rate: exact cones under polarization and exact
ellipsoids under Steiner symmetrization.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from polar_lab.errors import ConfigError
from polar_lab.experiments.base import Experiment, bound_check
from polar_lab.experiments.models import AcceptanceCheck, TrialWorld
from polar_lab.experiments.registry import register_experiment
from polar_lab.functions.ellipsoid import EllipsoidFunction
from polar_lab.functions.shapes import build_cone, build_ellipsoid
from polar_lab.operators.polarize import polarize_cone
from polar_lab.operators.steiner import steiner_ellipsoid
from polar_lab.sampling.specs import UniformDirection, UniformPolar
from polar_lab.sampling.streams import build_stream


def _initial(experiment: Experiment, kind: str) -> dict[str, Any]:
    template = experiment.config.initial
    if str(template.get("kind", "")).lower() != kind:
        raise ConfigError(f"'{experiment.name}' needs an initial {kind}")
    return template


@register_experiment("lower-cone")
class LowerCone(Experiment):
    """
    ``E |a_n|`` for a cone polarized by a law symmetric under ``u -> -u``
    stays above ``|a_0| 2^(-n)``.
    """

    description = "E|apex_n| >= |apex_0| 2^-n under uniform polarizations"
    columns = ("apex_norm", "sup_dist")
    audit_columns = ("apex_norm",)

    def setup(self) -> None:
        self.cone = build_cone(_initial(self, "cone"), self.config.d)
        self.spec = self.sampler_spec()
        self.require_sampler(self.spec, UniformPolar.kind)

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        return TrialWorld(trial, self.cone, build_stream(self.spec, rng))

    def apply(self, state: Any, param: Any) -> Any:
        return polarize_cone(state, param)

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        return {
            "apex_norm": world.state.apex_norm,
            "sup_dist": world.state.sup_distance_to_sdr(),
        }

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        a0 = self.cone.apex_norm
        return [
            bound_check(
                "apex-lower-bound",
                agg,
                "apex_norm",
                lambda n: a0 * 2.0**-n,
                upper=False,
            )
        ]


@register_experiment("lower-ellipsoid")
class LowerEllipsoid(Experiment):
    """
    ``E ||F_n - f*||`` for an ellipsoid under uniform Steiner steps stays
    above ``1/4 ||f - f*|| 3^(-n)`` when ``lam_max <= 2 lam_min``.
    """

    description = "E||F_n - f*|| >= 1/4 ||f - f*|| 3^-n for ellipsoids"
    columns = ("sup_dist", "sup_lower", "eigen_gap")
    audit_columns = ("eigen_gap",)

    def setup(self) -> None:
        template = _initial(self, "ellipsoid")
        self.ellipsoid = build_ellipsoid(template, self.config.d)
        gap = self.ellipsoid.eigen_gap()
        if gap.lam_max > 2.0 * gap.lam_min * (1.0 + 1e-12):
            raise ConfigError(
                "lower-ellipsoid needs lam_max <= 2 lam_min; "
                "set 'ratio_cap': 2 on the initial template"
            )
        self.spec = self.sampler_spec()
        self.require_sampler(self.spec, UniformDirection.kind)
        self.initial_distance = self.ellipsoid.sup_distance_to_sdr()

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        return TrialWorld(
            trial, self.ellipsoid.M, build_stream(self.spec, rng)
        )

    def apply(self, state: Any, param: Any) -> Any:
        return steiner_ellipsoid(state, param)

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        current = EllipsoidFunction(world.state)
        lower, _ = current.sup_distance_bounds()
        return {
            "sup_dist": current.sup_distance_to_sdr(),
            "sup_lower": lower,
            "eigen_gap": current.eigen_gap().gap,
        }

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        start = self.initial_distance
        return [
            bound_check(
                "sup-lower-bound",
                agg,
                "sup_lower",
                lambda n: 0.25 * start * 3.0**-n,
                upper=False,
            )
        ]

    def report(self, results) -> dict[str, Any]:
        gap = self.ellipsoid.eigen_gap()
        return {
            "initial_sup_dist": self.initial_distance,
            "lam_max": gap.lam_max,
            "lam_min": gap.lam_min,
        }


__all__ = ["LowerCone", "LowerEllipsoid"]
