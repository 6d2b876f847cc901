"""
Ellipsoid functions ``f(x) = [1 - <x, M x>]^+`` represented by ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from polar_lab.constants import SYMMETRIC_TOL
from polar_lab.eigen import EigenGap, eigen_gap, jacobi_eigh, matrix_power
from polar_lab.errors import NotPositiveDefiniteError
from polar_lab.functions.grid import GridFunction
from polar_lab.functions.lattice import Lattice


def require_spd(matrix, *, tol: float = SYMMETRIC_TOL) -> np.ndarray:
    """
    Return ``matrix`` as a symmetrized float array.

    :raises ValueError: If the matrix is not square or not symmetric.
    :raises NotPositiveDefiniteError: If it is not positive definite.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.T)) > tol * max(1.0, float(np.max(np.abs(m)))):
        raise ValueError("matrix is not symmetric")
    m = 0.5 * (m + m.T)
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    return m


@dataclass(frozen=True)
class EllipsoidFunction:
    """
    Unit-height function whose level sets are concentric ellipsoids.

    :ivar M (np.ndarray): Symmetric positive definite ``d x d`` matrix.
    """

    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", require_spd(self.M))

    @property
    def dimension(self) -> int:
        """Ambient dimension."""
        return int(self.M.shape[0])

    @property
    def determinant(self) -> float:
        """``det M``."""
        return float(np.linalg.det(self.M))

    @property
    def lam_star(self) -> float:
        """Geometric mean of the eigenvalues."""
        return self.determinant ** (1.0 / self.dimension)

    def eigen_gap(self) -> EigenGap:
        """Extremal eigenvalues of ``M``."""
        return eigen_gap(self.M)

    def evaluate(self, points) -> np.ndarray:
        """Function values at ``points`` of shape ``(..., d)``."""
        points = np.asarray(points, dtype=float)
        quad = np.einsum("...i,ij,...j->...", points, self.M, points)
        return np.maximum(1.0 - quad, 0.0)

    def sup_distance_to_sdr(self) -> float:
        """
        Exact ``||f - f*||_inf``.

        Along a ray where the quadratic form is ``q |x|^2`` the difference
        peaks where the smaller ball ends, which gives
        ``max(1 - lam_min / lam*, 1 - lam* / lam_max)``.
        """
        gap = self.eigen_gap()
        star = self.lam_star
        return max(1.0 - gap.lam_min / star, 1.0 - star / gap.lam_max, 0.0)

    def sup_distance_bounds(self) -> tuple[float, float]:
        """
        ``(lam_max - lam_min) / (2 lam_max)`` and
        ``(lam_max - lam_min) / lam_min`` bracketing ``||f - f*||_inf``.
        """
        gap = self.eigen_gap()
        return gap.gap / (2.0 * gap.lam_max), gap.gap / gap.lam_min

    def normalized(self, ratio_cap: float) -> "EllipsoidFunction":
        """
        Raise ``M`` to the power that brings ``lam_max / lam_min`` down to
        ``ratio_cap``. ``det`` becomes ``det ** power``, so a unit
        determinant stays one.
        """
        if ratio_cap <= 1.0:
            raise ValueError(f"ratio_cap must be > 1, got {ratio_cap}")
        gap = self.eigen_gap()
        ratio = gap.lam_max / gap.lam_min
        if ratio <= ratio_cap:
            return self
        exponent = math.log(ratio_cap) / math.log(ratio)
        return EllipsoidFunction(matrix_power(self.M, exponent))

    def eigenvectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvectors (columns)."""
        return jacobi_eigh(self.M)

    def to_grid(self, lattice: Lattice) -> GridFunction:
        """Sample on a lattice."""
        return GridFunction.from_callable(lattice, self.evaluate)


def sdr_ellipsoid(ellipsoid: EllipsoidFunction) -> EllipsoidFunction:
    """``lam* I`` with ``lam* = (det M)^(1/d)``."""
    return EllipsoidFunction(
        ellipsoid.lam_star * np.eye(ellipsoid.dimension)
    )


__all__ = ["EllipsoidFunction", "sdr_ellipsoid", "require_spd"]
