"""
Draws from the independent sampler families.
"""

from __future__ import annotations

from functools import lru_cache, singledispatch
from typing import Union

import numpy as np
from scipy import special

from polar_lab.constants import (
    GAUSSIAN_TABLE_NODES,
    GAUSSIAN_TAIL_MASS,
    REJECTION_BATCH,
    REJECTION_BUDGET,
)
from polar_lab.errors import RejectionBudgetExceededError, UnsupportedSpecError
from polar_lab.geometry import PolarParam, random_direction, random_directions
from polar_lab.sampling.specs import (
    AdversarialCone,
    AdversarialSteiner,
    FiniteIID,
    GaussianPolar,
    PoissonDirection,
    UniformDirection,
    UniformPolar,
)
from polar_lab.utils import logger

Draw = Union[PolarParam, np.ndarray]


def _positive_uniform(rng: np.random.Generator, high: float) -> float:
    r = 0.0
    while r == 0.0:
        r = float(rng.uniform(0.0, high))
    return r


@lru_cache(maxsize=16)
def chi_table(d: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Tabulated CDF of ``|X|`` for a standard Gaussian ``X`` in R^d.

    Returns strictly increasing CDF values and the matching radii.
    """
    shape = d / 2.0
    tail = special.gammaincinv(shape, 1.0 - GAUSSIAN_TAIL_MASS)
    s_max = float(np.sqrt(2.0 * tail))
    nodes = np.linspace(0.0, s_max, GAUSSIAN_TABLE_NODES)
    cdf = special.gammainc(shape, nodes**2 / 2.0)
    cdf /= cdf[-1]
    cdf, first = np.unique(cdf, return_index=True)
    return cdf, nodes[first]


@singledispatch
def sample(spec, i: int, rng: np.random.Generator) -> Draw:
    """
    One draw of step ``i`` from the law described by ``spec``.

    Polar families return a :class:`PolarParam`, direction families a
    unit vector.

    :raises UnsupportedSpecError: For feedback (adversarial) specs, which
        need the evolving state; use :func:`build_stream` instead.
    """
    raise UnsupportedSpecError(f"cannot sample {type(spec).__name__}")


@sample.register
def _(spec: UniformPolar, i: int, rng: np.random.Generator) -> Draw:
    del i
    r = _positive_uniform(rng, 2.0 * spec.L)
    return PolarParam(r, random_direction(rng, spec.d))


@sample.register
def _(spec: UniformDirection, i: int, rng: np.random.Generator) -> Draw:
    del i
    return random_direction(rng, spec.d)


@sample.register
def _(spec: GaussianPolar, i: int, rng: np.random.Generator) -> Draw:
    t = spec.schedule(i)
    if not t > 0:
        raise ValueError(f"Gaussian schedule must be positive, got {t}")
    cdf, radii = chi_table(spec.d)
    r = 0.0
    while r == 0.0:
        r = float(np.sqrt(t) * np.interp(rng.random(), cdf, radii))
    return PolarParam(r, random_direction(rng, spec.d))


def poisson_density(z: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``(1 - |z|^2) / |z - u|^d`` relative to the uniform sphere law."""
    d = z.shape[-1]
    gap = np.linalg.norm(u - z, axis=-1)
    return (1.0 - float(z @ z)) / gap**d


@sample.register
def _(spec: PoissonDirection, i: int, rng: np.random.Generator) -> Draw:
    z = spec.pole(i)
    radius = float(np.linalg.norm(z))
    if radius == 0.0:
        return random_direction(rng, spec.d)
    envelope = (1.0 + radius) / (1.0 - radius) ** (spec.d - 1)
    proposed = 0
    while proposed < REJECTION_BUDGET:
        batch = min(REJECTION_BATCH, REJECTION_BUDGET - proposed)
        candidates = random_directions(rng, batch, spec.d)
        accept = rng.random(batch) * envelope <= poisson_density(
            z, candidates
        )
        proposed += batch
        hits = np.flatnonzero(accept)
        if len(hits):
            logger.debug(f"Poisson step {i}: {proposed} proposals")
            return candidates[hits[0]]
    raise RejectionBudgetExceededError(
        f"no Poisson draw within {REJECTION_BUDGET} proposals at |z|={radius}"
    )


@sample.register
def _(spec: FiniteIID, i: int, rng: np.random.Generator) -> Draw:
    del i
    directions = spec.direction_array()
    if spec.weights:
        weights = np.asarray(spec.weights, dtype=float)
        k = int(rng.choice(len(directions), p=weights / weights.sum()))
    else:
        k = int(rng.integers(len(directions)))
    if spec.radial.kind == "uniform":
        r = _positive_uniform(rng, spec.radial.scale)
    else:
        r = 0.0
        while r == 0.0:
            r = float(rng.exponential(spec.radial.scale))
    return PolarParam(r, directions[k])


@sample.register(AdversarialCone)
@sample.register(AdversarialSteiner)
def _(spec, i: int, rng: np.random.Generator) -> Draw:
    raise UnsupportedSpecError(
        f"{spec.kind} is a feedback sampler; build a stream for it"
    )


__all__ = ["Draw", "sample", "chi_table", "poisson_density"]
