"""
Polarization (two-point symmetrization) of grid functions, grid sets
and cones, plus the exact drop identity and the expected-drop bound.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable

import numpy as np

from polar_lab.errors import AlreadySymmetricError, NoValidRhoError
from polar_lab.functions.cone import ConeFunction
from polar_lab.functions.grid import (
    GridFunction,
    GridSet,
    modulus_profile,
    sdr_grid,
    sup_distance,
)
from polar_lab.functions.mirror import lattice_mirror
from polar_lab.geometry import (
    PolarParam,
    ball_volume,
    fold,
    half_space_side,
    reflect,
    sphere_area,
)
from polar_lab.metrics import I_functional

MODULUS_SLACK = 1e-12


class PolarizeMode(str, Enum):
    """
    How mirrored values are read.

    :cvar INTERP: Multilinear interpolation, any ``omega``.
    :cvar MIRROR_EXACT: Exact lattice values, lattice-compatible ``omega``.
    """

    INTERP = "interp"
    MIRROR_EXACT = "mirror-exact"


def _two_point(
    values: np.ndarray, mirrored: np.ndarray, sides: np.ndarray
) -> np.ndarray:
    return np.where(
        sides > 0,
        np.maximum(values, mirrored),
        np.where(sides < 0, np.minimum(values, mirrored), values),
    )


def polarize_grid(
    f: GridFunction,
    omega: PolarParam,
    mode: PolarizeMode = PolarizeMode.INTERP,
) -> GridFunction:
    """
    Polarize ``f`` with respect to the reflection ``omega``.

    Positive cells take the larger of the pair, negative cells the
    smaller, boundary cells keep their value.

    :raises NotLatticeCompatibleError: In ``MIRROR_EXACT`` mode when the
        mirror does not map the lattice onto itself.
    """
    mode = PolarizeMode(mode)
    if mode is PolarizeMode.MIRROR_EXACT:
        mirror = lattice_mirror(f.lattice, omega)
        mirrored = mirror.apply(f.values)
        sides = mirror.sides()
    else:
        centers = f.lattice.centers
        mirrored = f.evaluate(reflect(omega, centers))
        sides = half_space_side(omega, centers)
    return f.with_values(_two_point(f.values, mirrored, sides))


def polarize_set(
    A: GridSet,
    omega: PolarParam,
    mode: PolarizeMode = PolarizeMode.MIRROR_EXACT,
) -> GridSet:
    """
    Polarize a cell set.

    ``INTERP`` mode reads the mirror image from the nearest cell, so the
    result is a set; its cardinality is only approximately preserved.
    """
    mode = PolarizeMode(mode)
    if mode is PolarizeMode.MIRROR_EXACT:
        mirror = lattice_mirror(A.lattice, omega)
        mirrored = mirror.apply_mask(A.mask)
        sides = mirror.sides()
    else:
        lattice = A.lattice
        images = reflect(omega, lattice.centers)
        index = np.rint(lattice.to_index_coords(images)).astype(np.int64)
        inside = np.all((index >= 0) & (index < lattice.n_cells), axis=-1)
        index = np.clip(index, 0, lattice.n_cells - 1)
        mirrored = A.mask[tuple(np.moveaxis(index, -1, 0))] & inside
        sides = half_space_side(omega, lattice.centers)
    return GridSet(A.lattice, _two_point(A.mask, mirrored, sides))


def polarize_cone(cone: ConeFunction, omega: PolarParam) -> ConeFunction:
    """Fold the apex."""
    if not omega.r > 0:
        raise ValueError("cone polarization needs r > 0")
    return ConeFunction(fold(omega, cone.apex))


def I_drop_identity(  # pylint: disable=invalid-name
    f: GridFunction, omega: PolarParam
) -> float:
    """
    ``h^d * sum [f(sigma x) - f(x)]^+ [|sigma x| - |x|]^+``.

    Equals ``I(f) - I(S f)`` for lattice-exact ``omega``.

    :raises NotLatticeCompatibleError: If ``omega`` is not lattice-exact.
    """
    mirror = lattice_mirror(f.lattice, omega)
    gain = np.maximum(mirror.apply(f.values) - f.values, 0.0)
    radii = f.lattice.radii
    lever = np.maximum(mirror.apply(radii) - radii, 0.0)
    return float(np.sum(gain * lever)) * f.lattice.cell_volume


def telescoping_drops(
    f: GridFunction, omegas: Iterable[PolarParam]
) -> tuple[GridFunction, list[float]]:
    """
    Apply a lattice-exact polarization sequence, returning the final
    function and the drop of ``I`` at every step.
    """
    drops = []
    current = f
    for omega in omegas:
        drops.append(I_drop_identity(current, omega))
        current = polarize_grid(current, omega, PolarizeMode.MIRROR_EXACT)
    return current, drops


def uniform_drop_bound(eps: float, rho: float, d: int, L: float) -> float:
    """
    ``C_eps * m(B_rho) / (m(S^{d-1}) (2L)^d)`` with
    ``C_eps = eps rho m(B_rho) / 2``.
    """
    volume = ball_volume(d, rho)
    c_eps = eps * rho * volume / 2.0
    return c_eps * volume / (sphere_area(d) * (2.0 * L) ** d)


def admissible_radius(f: GridFunction, eps: float) -> float:
    """
    Largest multiple ``m h`` of the cell width with modulus ``<= eps / 8``.

    :raises NoValidRhoError: If already ``rho = h`` violates it.
    """
    h = f.lattice.h
    limit = eps / 8.0 + MODULUS_SLACK
    reach = 8
    while True:
        distances, eta = modulus_profile(f, reach * h)
        multiples = np.arange(1, reach + 1) * h
        idx = np.searchsorted(distances, multiples * (1 + 1e-12), "right")
        eta_at = np.where(idx > 0, eta[np.maximum(idx - 1, 0)], 0.0)
        ok = eta_at <= limit
        if not ok[0]:
            raise NoValidRhoError(
                f"modulus at h={h} is {eta_at[0]} > eps/8={eps / 8}"
            )
        if not ok.all():
            return float(multiples[int(np.argmin(ok)) - 1])
        if reach * h >= 2.0 * f.lattice.L * np.sqrt(f.lattice.d):
            return float(multiples[-1])
        reach *= 2


def drop_lower_bound_uniform(f: GridFunction, L: float) -> float:
    """
    Certified lower bound on ``E[I(f) - I(S_W f)]`` for ``W`` uniform on
    ``(0, 2L) x S^{d-1}``.

    :raises AlreadySymmetricError: If ``f`` equals its rearrangement.
    :raises NoValidRhoError: If no lattice radius is admissible.
    """
    eps = sup_distance(f, sdr_grid(f))
    if eps == 0.0:
        raise AlreadySymmetricError("f equals its rearrangement")
    rho = admissible_radius(f, eps)
    return uniform_drop_bound(eps, rho, f.lattice.d, L)


def weak_tail_bound(f: GridFunction, L: float, n: int, eps: float) -> float:
    """
    Bound on ``P(||F_n - f*||_inf >= eps)`` for ``n`` uniform steps.

    Every step taken while the distance is still ``>= eps`` lowers ``I``
    by at least the uniform drop bound in expectation, and the total
    drop is at most ``I(f) - I(f*)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rho = admissible_radius(f, eps)
    budget = I_functional(f) - I_functional(sdr_grid(f))
    per_step = uniform_drop_bound(eps, rho, f.lattice.d, L)
    return min(1.0, max(budget, 0.0) / (n * per_step))


__all__ = [
    "PolarizeMode",
    "polarize_grid",
    "polarize_set",
    "polarize_cone",
    "I_drop_identity",
    "telescoping_drops",
    "uniform_drop_bound",
    "admissible_radius",
    "drop_lower_bound_uniform",
    "weak_tail_bound",
]
