"""
Steiner symmetrization of grid functions and the exact ellipsoid
calculus.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import betainc

from polar_lab.constants import LATTICE_TOL
from polar_lab.eigen import eigen_gap, jacobi_eigh
from polar_lab.errors import AlreadySymmetricError, NotUnitDeterminantError
from polar_lab.functions.ellipsoid import require_spd
from polar_lab.functions.grid import GridFunction, sdr_grid, sup_distance
from polar_lab.geometry import as_direction, ball_volume
from polar_lab.operators.polarize import admissible_radius

UNIT_DET_TOL = 1e-9


@lru_cache(maxsize=64)
def line_positions(n: int) -> np.ndarray:
    """
    Positions along a line of ``n`` cells ordered by distance to the
    line's center, ties toward the negative index.
    """
    offsets = np.abs(2 * np.arange(n) + 1 - n)
    return np.argsort(offsets, kind="stable")


def symmetrize_axis(values: np.ndarray, axis: int) -> np.ndarray:
    """Symmetric decreasing rearrangement of every line along ``axis``."""
    moved = np.moveaxis(values, axis, -1)
    descending = np.sort(moved, axis=-1)[..., ::-1]
    out = np.empty_like(moved)
    out[..., line_positions(moved.shape[-1])] = descending
    return np.moveaxis(out, -1, axis)


def lattice_axis(u, *, tol: float = LATTICE_TOL) -> int | None:
    """Index ``k`` if ``u = +-e_k`` within ``tol``, else ``None``."""
    u = as_direction(u)
    k = int(np.argmax(np.abs(u)))
    if abs(abs(u[k]) - 1.0) <= tol and np.all(np.abs(np.delete(u, k)) <= tol):
        return k
    return None


def householder_to_e1(u) -> np.ndarray:
    """Symmetric orthogonal matrix ``H`` with ``H u = e_1``."""
    u = as_direction(u)
    e1 = np.zeros_like(u)
    e1[0] = 1.0
    w = u - e1
    norm2 = float(w @ w)
    if norm2 == 0.0:
        return np.eye(len(u))
    return np.eye(len(u)) - 2.0 * np.outer(w, w) / norm2


def steiner_grid(f: GridFunction, u) -> GridFunction:
    """
    Steiner symmetrization of a grid function along ``u``.

    Axis directions rearrange the samples of every lattice line exactly.
    Other directions rotate ``u`` onto the first axis by resampling,
    symmetrize there and resample back.
    """
    axis = lattice_axis(u)
    if axis is not None:
        return f.with_values(symmetrize_axis(f.values, axis))

    H = householder_to_e1(u)  # pylint: disable=invalid-name
    centers = f.lattice.centers
    rotated = f.with_values(f.evaluate(centers @ H))
    rotated = rotated.with_values(symmetrize_axis(rotated.values, 0))
    return f.with_values(rotated.evaluate(centers @ H))


def steiner_ellipsoid(matrix, u) -> np.ndarray:
    """
    Matrix of the Steiner symmetral of ``{<x, M x> < 1}`` along ``u``.

    ``M' = M - (Mu)(Mu)^T / <u, Mu> + <u, Mu> u u^T``.

    :raises NotPositiveDefiniteError: If ``M`` is not positive definite.
    """
    m = require_spd(matrix)
    u = as_direction(u)
    mu = m @ u
    q = float(u @ mu)
    out = m - np.outer(mu, mu) / q + q * np.outer(u, u)
    return 0.5 * (out + out.T)


def steiner_ellipsoid_batch(matrix, directions) -> np.ndarray:
    """
    Steiner symmetrals of one ellipsoid along a stack of unit directions
    of shape ``(k, d)``; returns ``(k, d, d)``.
    """
    m = require_spd(matrix)
    u = np.asarray(directions, dtype=float)
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    mu = u @ m
    q = np.einsum("ki,ki->k", u, mu)[:, None, None]
    out = (
        m
        - np.einsum("ki,kj->kij", mu, mu) / q
        + q * np.einsum("ki,kj->kij", u, u)
    )
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def ellipsoid_to_ball(matrix) -> list[np.ndarray]:
    """
    ``d - 1`` orthonormal directions whose Steiner symmetrizations, in
    order, turn a unit-determinant ellipsoid into the unit ball.

    Each direction solves ``<u, M u> = 1`` on the great circle joining
    the extremal eigenvectors of the form restricted to the directions
    not yet used.

    :raises NotUnitDeterminantError: If ``|det M - 1| > 1e-9``.
    """
    current = require_spd(matrix)
    det = float(np.linalg.det(current))
    if abs(det - 1.0) > UNIT_DET_TOL:
        raise NotUnitDeterminantError(f"det M = {det}, expected 1")

    d = current.shape[0]
    basis = np.eye(d)
    directions: list[np.ndarray] = []
    for _ in range(d - 1):
        restricted = basis.T @ current @ basis
        values, vectors = jacobi_eigh(restricted)
        low, high = vectors[:, 0], vectors[:, -1]

        def excess(theta, restricted=restricted, low=low, high=high):
            w = math.cos(theta) * low + math.sin(theta) * high
            return float(w @ restricted @ w) - 1.0

        if values[-1] - values[0] <= 1e-12 or excess(0.0) >= 0.0:
            theta = 0.0
        elif excess(math.pi / 2.0) <= 0.0:
            theta = math.pi / 2.0
        else:
            theta = brentq(excess, 0.0, math.pi / 2.0, xtol=1e-15)

        w = math.cos(theta) * low + math.sin(theta) * high
        w_perp = -math.sin(theta) * low + math.cos(theta) * high
        u = as_direction(basis @ w)
        directions.append(u)
        current = steiner_ellipsoid(current, u)

        rest = [vectors[:, j] for j in range(1, vectors.shape[1] - 1)]
        rest.append(w_perp)
        basis = basis @ np.column_stack(rest)

    return directions


def _psi(t: float) -> float:
    return t * t * (1.0 - t * t)


def eval_gap_bound(matrix, u) -> float:
    """
    Lower bound on the eigenvalue gap after one Steiner step along ``u``:
    ``(1 - C psi(<u, v_max>) - 2 psi(<u, v_min>)) (lam_max - lam_min)``
    with ``psi(t) = t^2 (1 - t^2)`` and ``C = 1 + lam_max / lam_min``.
    """
    m = require_spd(matrix)
    u = as_direction(u)
    values, vectors = jacobi_eigh(m)
    lam_min, lam_max = float(values[0]), float(values[-1])
    c = 1.0 + lam_max / lam_min
    factor = (
        1.0
        - c * _psi(float(u @ vectors[:, -1]))
        - 2.0 * _psi(float(u @ vectors[:, 0]))
    )
    return factor * (lam_max - lam_min)


def expected_gap_factor(c: float, d: int) -> float:
    """
    Mean of the gap-bound factor over uniform directions:
    ``1 - (C + 2) (1/d - 3 / (d (d + 2)))``.
    """
    return 1.0 - (c + 2.0) * (1.0 / d - 3.0 / (d * (d + 2)))


def axis_cap_probability(d: int, ratio: float) -> float:
    """
    Probability that a uniform direction ``U`` has ``sin d(U, v) < ratio``
    for a fixed ``v``: two antipodal caps of angular radius
    ``arcsin(ratio)``.
    """
    if d == 1 or ratio >= 1.0:
        return 1.0
    if ratio <= 0.0:
        return 0.0
    return float(betainc((d - 1) / 2.0, 0.5, ratio * ratio))


def drop_lower_bound_steiner(f: GridFunction, L: float) -> float:
    """
    Certified lower bound on ``E[I(f) - I(S_U f)]`` for one Steiner step
    along a uniform direction ``U``, ``f`` supported in ``B_L``.

    :raises AlreadySymmetricError: If ``f`` equals its rearrangement.
    :raises NoValidRhoError: If no lattice radius is admissible.
    """
    eps = sup_distance(f, sdr_grid(f))
    if eps == 0.0:
        raise AlreadySymmetricError("f equals its rearrangement")
    rho = admissible_radius(f, eps)
    d = f.lattice.d
    c_eps = eps * rho * ball_volume(d, rho) / 8.0
    return c_eps * axis_cap_probability(d, rho / (2.0 * L))


__all__ = [
    "line_positions",
    "symmetrize_axis",
    "lattice_axis",
    "householder_to_e1",
    "steiner_grid",
    "steiner_ellipsoid",
    "steiner_ellipsoid_batch",
    "ellipsoid_to_ball",
    "eigen_gap",
    "eval_gap_bound",
    "expected_gap_factor",
    "axis_cap_probability",
    "drop_lower_bound_steiner",
]
