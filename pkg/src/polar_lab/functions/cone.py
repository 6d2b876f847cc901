"""
Cones ``f(x) = [1 - |x - a|]^+`` represented by their apex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polar_lab.functions.grid import GridFunction
from polar_lab.functions.lattice import Lattice


@dataclass(frozen=True)
class ConeFunction:
    """
    Unit-height, unit-radius cone.

    :ivar apex (np.ndarray): Apex ``a``.
    """

    apex: np.ndarray

    def __post_init__(self):
        apex = np.array(self.apex, dtype=float)
        if apex.ndim != 1 or not np.all(np.isfinite(apex)):
            raise ValueError("apex must be a finite vector")
        object.__setattr__(self, "apex", apex)

    @property
    def dimension(self) -> int:
        """Ambient dimension."""
        return int(self.apex.shape[0])

    @property
    def apex_norm(self) -> float:
        """``|a|``."""
        return float(np.linalg.norm(self.apex))

    def evaluate(self, points) -> np.ndarray:
        """Cone values at ``points`` of shape ``(..., d)``."""
        points = np.asarray(points, dtype=float)
        return np.maximum(
            1.0 - np.linalg.norm(points - self.apex, axis=-1), 0.0
        )

    def sup_distance(self, other: "ConeFunction") -> float:
        """``min(|a - a'|, 1)``."""
        return min(float(np.linalg.norm(self.apex - other.apex)), 1.0)

    def sup_distance_to_sdr(self) -> float:
        """``min(|a|, 1)``."""
        return min(self.apex_norm, 1.0)

    def to_grid(self, lattice: Lattice) -> GridFunction:
        """Sample on a lattice."""
        return GridFunction.from_callable(lattice, self.evaluate)


def sdr_cone(cone: ConeFunction) -> ConeFunction:
    """Move the apex to the origin."""
    return ConeFunction(np.zeros_like(cone.apex))


__all__ = ["ConeFunction", "sdr_cone"]
