"""
Random Steiner symmetrizations: grid rates for i.i.d. directions and the
expected eigenvalue gap of an ellipsoid after one uniform step.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from polar_lab.eigen import jacobi_eigh
from polar_lab.errors import ConfigError
from polar_lab.experiments.base import Experiment, bound_check
from polar_lab.experiments.models import (
    AcceptanceCheck,
    ResultRow,
    TrialResult,
    TrialWorld,
)
from polar_lab.experiments.polarization import (
    DEFAULT_GRID_ALLOWANCE,
    holder_bound,
    rate_constant,
)
from polar_lab.experiments.registry import register_experiment
from polar_lab.functions.grid import l1_distance, sdr_grid, sup_distance
from polar_lab.functions.shapes import build_ellipsoid, build_grid
from polar_lab.geometry import PolarParam, random_directions, sphere_area
from polar_lab.operators.steiner import (
    expected_gap_factor,
    steiner_ellipsoid_batch,
    steiner_grid,
)
from polar_lab.sampling.specs import (
    FiniteIID,
    PoissonDirection,
    UniformDirection,
)
from polar_lab.sampling.streams import build_stream

DEFAULT_BATCH = 10_000
GAP_BOUND_TOL = 1e-9


def _direction(param: Any) -> np.ndarray:
    return param.u if isinstance(param, PolarParam) else param


def _psi(t: np.ndarray) -> np.ndarray:
    return t * t * (1.0 - t * t)


@register_experiment("steiner-rate")
class SteinerRate(Experiment):
    """
    ``E ||S_{U_1..U_n} f - f*||`` for i.i.d. Steiner directions. Under
    uniform directions the L1 distance is checked against
    ``2 d m(B_{2L}) ||f|| / n`` and the sup distance against the Hoelder
    rate.
    """

    description = "||S_U1..Un f - f*|| along i.i.d. Steiner directions"
    columns = ("sup_dist", "l1_dist", "l1_bound", "holder_bound")
    audit_columns = ("sup_dist",)

    def setup(self) -> None:
        self.grid = self.lattice()
        self.spec = self.sampler_spec()
        self.require_sampler(
            self.spec,
            UniformDirection.kind,
            PoissonDirection.kind,
            FiniteIID.kind,
        )
        if not self.config.initial:
            raise ConfigError("'steiner-rate' needs an 'initial' template")
        self.initial = build_grid(
            self.config.initial, self.grid, self.setup_rng()
        )
        self.target = sdr_grid(self.initial)
        self.L = float(self.config.param("L", self.grid.L))
        self.c = float(self.config.param("holder_c", 1.0))
        self.alpha = float(self.config.param("holder_alpha", 1.0))

    def build_world(self, trial: int, rng: np.random.Generator) -> TrialWorld:
        return TrialWorld(trial, self.initial, build_stream(self.spec, rng))

    def apply(self, state: Any, param: Any) -> Any:
        return steiner_grid(state, _direction(param))

    def audit_tol(self) -> float:
        return self.config.tolerance("audit", self.grid.h)

    def observe(self, world: TrialWorld, step: int) -> dict[str, float]:
        d = self.config.d
        f = world.state
        scale = rate_constant(d, self.L) * self.initial.sup
        return {
            "sup_dist": sup_distance(f, self.target),
            "l1_dist": l1_distance(f, self.target),
            "l1_bound": scale / max(step, 1),
            "holder_bound": holder_bound(
                step, d, self.L, self.c, self.alpha
            ),
        }

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        if self.spec.kind != UniformDirection.kind:
            return []
        d = self.config.d
        factor = self.config.tolerance(
            "grid_allowance", DEFAULT_GRID_ALLOWANCE
        )
        sup_slack = factor * self.grid.h
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


@register_experiment("extremal-gap")
class ExtremalGap(Experiment):
    """
    Eigenvalue gap of an ellipsoid after one uniform Steiner step,
    relative to the initial gap, together with the gap-bound factor
    ``1 - C psi(<U, v_max>) - 2 psi(<U, v_min>)``.

    Every trial averages a batch of directions; the spread across trials
    gives the standard error.
    """

    description = "E gap(S_U M) / gap(M) >= 1/3 for one uniform step"
    columns = ("ratio", "factor")

    def setup(self) -> None:
        template = self.config.initial
        if str(template.get("kind", "")).lower() != "ellipsoid":
            raise ConfigError("'extremal-gap' needs an initial ellipsoid")
        self.ellipsoid = build_ellipsoid(template, self.config.d)
        values, vectors = jacobi_eigh(self.ellipsoid.M)
        self.lam_min, self.lam_max = float(values[0]), float(values[-1])
        if not self.lam_max > self.lam_min:
            raise ConfigError("'extremal-gap' needs a non-ball ellipsoid")
        self.v_min, self.v_max = vectors[:, 0], vectors[:, -1]
        self.c = 1.0 + self.lam_max / self.lam_min
        if not self.expected_factor() > 0.0:
            raise ConfigError(
                f"gap-bound factor is vacuous for C={self.c:.6g}; "
                "use a rounder ellipsoid"
            )
        self.batch = int(self.config.param("batch", DEFAULT_BATCH))
        if self.batch < 1:
            raise ConfigError("'batch' must be >= 1")

    def simulate(self, trial: int, rng: np.random.Generator):
        u = random_directions(rng, self.batch, self.config.d)
        values, _ = jacobi_eigh(steiner_ellipsoid_batch(self.ellipsoid.M, u))
        gaps = values[:, -1] - values[:, 0]
        ratio = gaps / (self.lam_max - self.lam_min)
        factor = (
            1.0
            - self.c * _psi(u @ self.v_max)
            - 2.0 * _psi(u @ self.v_min)
        )
        row = ResultRow(
            trial,
            1,
            {"ratio": float(ratio.mean()), "factor": float(factor.mean())},
        )
        bound = factor * (self.lam_max - self.lam_min)
        held = not np.any(gaps < bound - GAP_BOUND_TOL)
        return TrialResult(trial, [row], {"gap-bound": held})

    def expected_factor(self) -> float:
        """Exact mean of the gap-bound factor."""
        return expected_gap_factor(self.c, self.config.d)

    def acceptance(self, agg, results) -> list[AcceptanceCheck]:
        stats = agg.get(1)
        if stats is None:
            return [AcceptanceCheck("gap-ratio", False, "no trials")]
        ratio, factor = stats["ratio"], stats["factor"]
        exact = self.expected_factor()
        return [
            AcceptanceCheck(
                "gap-ratio",
                ratio.upper() >= 1.0 / 3.0,
                f"mean ratio {ratio.mean:.6g} (se {ratio.se:.3g})",
            ),
            AcceptanceCheck(
                "gap-factor",
                factor.lower() <= exact <= factor.upper(),
                f"mean factor {factor.mean:.6g} (se {factor.se:.3g}), "
                f"exact {exact:.6g}",
            ),
        ]

    def report(self, results) -> dict[str, Any]:
        return {
            "C": self.c,
            "expected_factor": self.expected_factor(),
            "directions": self.batch * len(results),
        }


__all__ = ["SteinerRate", "ExtremalGap"]
