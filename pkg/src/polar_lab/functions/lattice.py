"""
Regular lattice of cell centers on the box [-L, L]^d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from polar_lab.errors import LatticeMismatchError


@dataclass(frozen=True)
class Lattice:
    """
    Cell-centered lattice ``x_i = -L + (i + 1/2) h`` with ``h = 2L / n``.

    :ivar d (int): Dimension.
    :ivar L (float): Half-width of the storage box.
    :ivar n_cells (int): Cells per axis.
    """

    d: int
    L: float
    n_cells: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def h(self) -> float:
        """Cell width."""
        return 2.0 * self.L / self.n_cells

    @property
    def shape(self) -> tuple[int, ...]:
        """Array shape of values on this lattice."""
        return (self.n_cells,) * self.d

    @property
    def cell_volume(self) -> float:
        """``h ** d``."""
        return self.h**self.d

    @cached_property
    def axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.L + (np.arange(self.n_cells) + 0.5) * self.h

    @cached_property
    def centers(self) -> np.ndarray:
        """All cell centers, shape ``shape + (d,)``."""
        grids = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack(grids, axis=-1)

    @cached_property
    def radii(self) -> np.ndarray:
        """``|center|`` for every cell."""
        return np.linalg.norm(self.centers, axis=-1)

    @cached_property
    def radial_key(self) -> np.ndarray:
        """
        Exact integer proxy for ``|center|^2``.

        ``center_k = (h / 2) (2 i_k + 1 - n)``, so the sum of squares of
        the odd integers ``2 i_k + 1 - n`` orders cells by radius without
        rounding.
        """
        odd = 2 * np.arange(self.n_cells, dtype=np.int64) + 1 - self.n_cells
        squares = odd * odd
        key = np.zeros(self.shape, dtype=np.int64)
        for k in range(self.d):
            expand = [np.newaxis] * self.d
            expand[k] = slice(None)
            key = key + squares[tuple(expand)]
        return key

    @cached_property
    def radial_order(self) -> np.ndarray:
        """
        Flat cell indices sorted by radius, ties by index tuple.

        A stable sort of the flat C-order index is lexicographic on the
        index tuple.
        """
        return np.argsort(self.radial_key.ravel(), kind="stable")

    def to_index_coords(self, points) -> np.ndarray:
        """Fractional index coordinates of ``points`` (..., d)."""
        points = np.asarray(points, dtype=float)
        return (points + self.L) / self.h - 0.5

    def inside_box(self, points) -> np.ndarray:
        """Mask of points inside the closed box."""
        points = np.asarray(points, dtype=float)
        return np.all(np.abs(points) <= self.L, axis=-1)

    def require_same(self, other: "Lattice") -> None:
        """
        :raises LatticeMismatchError: If ``other`` differs.
        """
        if self != other:
            raise LatticeMismatchError(f"{self} != {other}")


__all__ = ["Lattice"]
