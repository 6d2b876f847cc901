"""
Parameter streams: one object per trial that hands out ``W_i``.

Every stream exposes ``draw(i, state)``. Independent streams ignore the
state; feedback streams read it (the cone apex or the ellipsoid matrix).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Protocol

import numpy as np

from polar_lab.sampling.adversarial import (
    AdversarialConeSampler,
    AdversarialSteinerWalker,
)
from polar_lab.sampling.samplers import Draw, sample
from polar_lab.sampling.specs import (
    AdversarialCone,
    AdversarialSteiner,
    SamplerSpec,
)


class ParameterStream(Protocol):
    """Anything that yields the parameter of step ``i``."""

    def draw(self, i: int, state: Any = None) -> Draw:
        """Parameter of step ``i`` (1-based)."""


@dataclass
class IndependentStream:
    """
    Independent draws from a fixed family.

    :ivar spec (SamplerSpec): Law of every step.
    :ivar rng (np.random.Generator): Trial stream.
    """

    spec: SamplerSpec
    rng: np.random.Generator

    def draw(self, i: int, state: Any = None) -> Draw:
        """Parameter of step ``i``; ``state`` is ignored."""
        del state
        return sample(self.spec, i, self.rng)


def build_stream(
    spec: SamplerSpec, rng: np.random.Generator
) -> ParameterStream:
    """Stream matching ``spec``."""
    if isinstance(spec, AdversarialCone):
        return AdversarialConeSampler(spec)
    if isinstance(spec, AdversarialSteiner):
        return AdversarialSteinerWalker(spec)
    return IndependentStream(spec, rng)


__all__ = ["ParameterStream", "IndependentStream", "build_stream"]
