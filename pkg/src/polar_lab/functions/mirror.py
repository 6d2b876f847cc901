"""
Reflections that map the lattice onto itself.

A mirror ``<x, s e_k> = m h / 2`` sends cell index ``i`` along axis ``k``
to ``n - 1 + s m - i``; every other index is kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polar_lab.constants import LATTICE_TOL
from polar_lab.errors import NotLatticeCompatibleError
from polar_lab.functions.lattice import Lattice
from polar_lab.geometry import PolarParam


@dataclass(frozen=True)
class LatticeMirror:
    """
    Index form of a lattice-compatible reflection.

    :ivar lattice (Lattice): Lattice the mirror acts on.
    :ivar axis (int): Coordinate axis ``k`` of the normal.
    :ivar sign (int): ``+1`` for ``u = e_k``, ``-1`` for ``u = -e_k``.
    :ivar shift (int): ``r / h``.
    """

    lattice: Lattice
    axis: int
    sign: int
    shift: int

    def _expand(self, vector: np.ndarray) -> np.ndarray:
        shape = [1] * self.lattice.d
        shape[self.axis] = self.lattice.n_cells
        return vector.reshape(shape)

    @property
    def source(self) -> np.ndarray:
        """Mirror index along the axis for every index ``i``."""
        n = self.lattice.n_cells
        return n - 1 + self.sign * self.shift - np.arange(n)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """``values`` read at mirrored cells, zero where they leave the box."""
        n = self.lattice.n_cells
        src = self.source
        valid = (src >= 0) & (src < n)
        out = np.take(values, np.clip(src, 0, n - 1), axis=self.axis)
        return np.where(self._expand(valid), out, 0.0)

    def apply_mask(self, mask: np.ndarray) -> np.ndarray:
        """Boolean counterpart of :meth:`apply`."""
        return self.apply(mask.astype(float)) > 0.5

    def sides(self) -> np.ndarray:
        """
        Side of every cell as ``+1 / 0 / -1``, in exact integer arithmetic.

        With ``c = 2 i + 1 - n`` (the center in units of ``h / 2``), the
        sign of ``|sigma x|^2 - |x|^2`` is the sign of ``m (m - s c)``; for
        ``m = 0`` it is the sign of ``-s c``.
        """
        n = self.lattice.n_cells
        c = 2 * np.arange(n, dtype=np.int64) + 1 - n
        if self.shift == 0:
            key = -self.sign * c
        else:
            key = self.shift * (self.shift - self.sign * c)
        sides = np.sign(key).astype(np.int8)
        return np.broadcast_to(self._expand(sides), self.lattice.shape)


def lattice_mirror(
    lattice: Lattice, omega: PolarParam, *, tol: float = LATTICE_TOL
) -> LatticeMirror:
    """
    Index form of ``omega`` on ``lattice``.

    :raises NotLatticeCompatibleError: Unless ``u = +-e_k`` and ``r`` is
        an integer multiple of ``h``.
    """
    if omega.dimension != lattice.d:
        raise NotLatticeCompatibleError(
            f"dimension {omega.dimension} != lattice dimension {lattice.d}"
        )
    axis = int(np.argmax(np.abs(omega.u)))
    others = np.delete(omega.u, axis)
    if abs(abs(omega.u[axis]) - 1.0) > tol or np.any(np.abs(others) > tol):
        raise NotLatticeCompatibleError(f"u={omega.u} is not a lattice axis")
    ratio = omega.r / lattice.h
    shift = int(round(ratio))
    if abs(ratio - shift) > tol:
        raise NotLatticeCompatibleError(
            f"r={omega.r} is not a multiple of h={lattice.h}"
        )
    sign = 1 if omega.u[axis] > 0 else -1
    return LatticeMirror(lattice, axis, sign, shift)


__all__ = ["LatticeMirror", "lattice_mirror"]
