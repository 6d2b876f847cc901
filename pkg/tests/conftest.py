"""
Shared fixtures.
"""

from __future__ import annotations

import numpy as np
import pytest

from polar_lab.functions import GridFunction, Lattice
from polar_lab.sampling import trial_stream


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixed stream so property tests are reproducible."""
    return trial_stream(12345, 0)


@pytest.fixture
def lattice64() -> Lattice:
    """64 x 64 cells on [-2, 2]^2."""
    return Lattice(d=2, L=2.0, n_cells=64)


@pytest.fixture
def lattice32() -> Lattice:
    """32 x 32 cells on [-1, 1]^2."""
    return Lattice(d=2, L=1.0, n_cells=32)


@pytest.fixture
def make_bump(rng):
    """Random nonnegative values on the cells within a radius."""

    def _make(lattice: Lattice, radius: float) -> GridFunction:
        values = rng.random(lattice.shape)
        values[lattice.radii >= radius] = 0.0
        return GridFunction(lattice, values)

    return _make


@pytest.fixture
def bump64(lattice64, make_bump) -> GridFunction:
    """Random function supported in the unit ball of ``lattice64``."""
    return make_bump(lattice64, 1.0)
