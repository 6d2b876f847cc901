"""
Points, directions, reflections and folding maps in R^d.

Points and directions are plain ``numpy`` arrays; every function that
takes a point also accepts a stack of points of shape ``(..., d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from polar_lab.constants import BOUNDARY_TOL, DIRECTION_TOL
from polar_lab.errors import AntipodalInputError


class Side(IntEnum):
    """
    Position of a point relative to a reflection hyperplane.

    :cvar NEGATIVE: Farther from the origin than its mirror image.
    :cvar BOUNDARY: On the mirror hyperplane.
    :cvar POSITIVE: Closer to the origin than its mirror image.
    """

    NEGATIVE = -1
    BOUNDARY = 0
    POSITIVE = 1


def as_direction(vector, *, tol: float = DIRECTION_TOL) -> np.ndarray:
    """
    Return ``vector`` normalized to unit length.

    :raises ValueError: If the vector is (numerically) zero.
    """
    v = np.asarray(vector, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm <= tol:
        raise ValueError("cannot normalize a zero vector")
    return v / norm


@dataclass(frozen=True)
class PolarParam:
    """
    A point ``(r, u)`` of the parameter space labeling a reflection.

    The reflection maps the origin to ``r * u``.

    :ivar r (float): Distance of the image of the origin, ``r >= 0``.
    :ivar u (np.ndarray): Unit direction.
    """

    r: float
    u: np.ndarray

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise ValueError(f"r must be finite and >= 0, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "u", as_direction(self.u))

    @property
    def dimension(self) -> int:
        """Ambient dimension."""
        return int(self.u.shape[0])

    def flipped(self) -> "PolarParam":
        """Same radius, opposite direction."""
        return PolarParam(self.r, -self.u)

    def to_dict(self) -> dict:
        """JSON-friendly form."""
        return {"r": self.r, "u": [float(c) for c in self.u]}


def reflect(omega: PolarParam, x) -> np.ndarray:
    """Reflect ``x`` across the hyperplane ``<z, u> = r / 2``."""
    x = np.asarray(x, dtype=float)
    s = x @ omega.u
    return x + np.multiply.outer(omega.r - 2.0 * s, omega.u)


def _side_key(omega: PolarParam, x: np.ndarray) -> np.ndarray:
    s = x @ omega.u
    if omega.r == 0.0:
        # Origin on the mirror: u is the exterior normal of H+.
        return -s
    # |sigma x|^2 - |x|^2 = r (r - 2 <x, u>)
    return omega.r * (omega.r - 2.0 * s)


def half_space_side(
    omega: PolarParam, x, *, tol: float = BOUNDARY_TOL
) -> Side | np.ndarray:
    """
    Classify ``x`` against the mirror of ``omega``.

    Returns a :class:`Side` for a single point and an int array of side
    values for a stack of points.
    """
    x = np.asarray(x, dtype=float)
    key = _side_key(omega, x)
    sides = np.where(key > tol, 1, np.where(key < -tol, -1, 0))
    if x.ndim == 1:
        return Side(int(sides))
    return sides.astype(np.int8)


def fold(omega: PolarParam, x, *, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Fix the positive half-space of ``omega`` and reflect the rest."""
    x = np.asarray(x, dtype=float)
    negative = _side_key(omega, x) < -tol
    if x.ndim == 1:
        return reflect(omega, x) if negative else x.copy()
    out = x.copy()
    out[negative] = reflect(omega, x[negative])
    return out


def fold_direction(u, x) -> np.ndarray:
    """Folding map of the hyperplane through the origin with normal ``u``."""
    return fold(PolarParam(0.0, u), x)


def ball_volume(d: int, rho: float = 1.0) -> float:
    """Lebesgue volume of the ball of radius ``rho`` in R^d."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    return math.pi ** (d / 2.0) * rho**d / math.gamma(d / 2.0 + 1.0)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d."""
    return d * ball_volume(d, 1.0)


def angular_distance(u, v) -> float:
    """Geodesic distance between two unit vectors."""
    c = float(np.clip(np.dot(u, v), -1.0, 1.0))
    return math.acos(c)


def great_circle_step(
    v, target, step: float, *, tol: float = DIRECTION_TOL
) -> np.ndarray:
    """
    Move from ``v`` toward ``target`` by ``step`` radians along the
    great circle through both.

    :raises AntipodalInputError: If ``v`` and ``target`` are antipodal.
    """
    if step < 0:
        raise ValueError(f"step must be >= 0, got {step}")
    v = as_direction(v)
    target = as_direction(target)
    c = float(np.clip(np.dot(v, target), -1.0, 1.0))
    if c <= -1.0 + tol:
        raise AntipodalInputError("great circle between antipodes")
    theta = math.acos(c)
    if theta <= step:
        return target.copy()
    w = as_direction(target - c * v)
    return as_direction(math.cos(step) * v + math.sin(step) * w)


def random_directions(rng: np.random.Generator, count: int, d: int):
    """Draw ``count`` uniform unit vectors by normalizing Gaussians."""
    g = rng.standard_normal((count, d))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def random_direction(rng: np.random.Generator, d: int) -> np.ndarray:
    """Draw one uniform unit vector."""
    return random_directions(rng, 1, d)[0]


def orthogonal_to(v) -> np.ndarray:
    """A unit vector orthogonal to ``v`` built from the least aligned axis."""
    v = as_direction(v)
    axis = np.zeros_like(v)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    return as_direction(axis - np.dot(axis, v) * v)


__all__ = [
    "Side",
    "PolarParam",
    "as_direction",
    "reflect",
    "half_space_side",
    "fold",
    "fold_direction",
    "ball_volume",
    "sphere_area",
    "angular_distance",
    "great_circle_step",
    "random_directions",
    "random_direction",
    "orthogonal_to",
]
