"""
The monotone functional, set distances, and parallel-set machinery.

Distances between cells are Euclidean distances between cell centers,
computed with the exact distance transform of ``scipy.ndimage``.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from polar_lab.errors import EmptyParallelSetError, EmptySetError
from polar_lab.functions.grid import GridFunction, GridSet
from polar_lab.functions.mirror import lattice_mirror
from polar_lab.geometry import PolarParam, ball_volume


def I_functional(f: GridFunction) -> float:  # pylint: disable=invalid-name
    """``h^d * sum f(x) |x|`` over cell centers."""
    lattice = f.lattice
    return float(np.sum(f.values * lattice.radii)) * lattice.cell_volume


def symm_diff_volume(A: GridSet, B: GridSet) -> float:
    """``h^d * |A xor B|``."""
    A.lattice.require_same(B.lattice)
    return float(np.count_nonzero(A.mask ^ B.mask)) * A.lattice.cell_volume


def delta_drop(A: GridSet, Astar: GridSet, omega: PolarParam) -> float:
    """
    Decrease of the symmetric difference to ``Astar`` caused by one
    lattice-exact polarization of ``A``.

    Counts the cells of ``Astar - A`` whose mirror image lies in
    ``A - Astar``. ``Astar`` must be a radial prefix of the lattice
    (as produced by :func:`polar_lab.functions.sdr_set`).

    :raises NotLatticeCompatibleError: If ``omega`` is not lattice-exact.
    """
    A.lattice.require_same(Astar.lattice)
    mirror = lattice_mirror(A.lattice, omega)
    excess_mirrored = mirror.apply_mask(A.mask & ~Astar.mask)
    swapped = Astar.mask & ~A.mask & excess_mirrored
    return 2.0 * float(np.count_nonzero(swapped)) * A.lattice.cell_volume


def distance_to(B: GridSet) -> np.ndarray:
    """
    Distance from every cell center to the nearest cell of ``B``.

    :raises EmptySetError: If ``B`` is empty.
    """
    if B.is_empty():
        raise EmptySetError("distance to an empty set")
    return ndimage.distance_transform_edt(~B.mask, sampling=B.lattice.h)


def distance_to_complement(K: GridSet) -> np.ndarray:
    """
    Distance from every cell center to the nearest cell outside ``K``.

    The region beyond the box counts as outside.
    """
    padded = np.pad(K.mask, 1, constant_values=False)
    dist = ndimage.distance_transform_edt(padded, sampling=K.lattice.h)
    inner = tuple(slice(1, -1) for _ in range(K.lattice.d))
    return dist[inner]


def hausdorff(A: GridSet, B: GridSet) -> float:
    """
    Hausdorff distance between two cell sets.

    :raises EmptySetError: If either set is empty.
    """
    A.lattice.require_same(B.lattice)
    if A.is_empty() or B.is_empty():
        raise EmptySetError("Hausdorff distance needs nonempty sets")
    to_b = float(distance_to(B)[A.mask].max())
    to_a = float(distance_to(A)[B.mask].max())
    return max(to_a, to_b)


def parallel_set(K: GridSet, t: float) -> GridSet:
    """
    Outer parallel set ``{dist(x, K) < t}`` for ``t > 0``, inner parallel
    set ``{dist(x, complement K) > -t}`` for ``t < 0``, ``K`` for ``t = 0``.
    """
    if K.is_empty():
        raise EmptySetError("parallel set of an empty set")
    if t > 0:
        return GridSet(K.lattice, distance_to(K) < t)
    if t < 0:
        return GridSet(K.lattice, distance_to_complement(K) > -t)
    return K


def parallel_radius(K: GridSet, t: float) -> float:
    """
    Radius of the ball whose volume equals that of the parallel set.

    :raises EmptyParallelSetError: If the parallel set is empty.
    """
    shell = parallel_set(K, t)
    if shell.is_empty():
        raise EmptyParallelSetError(f"parallel set at t={t} is empty")
    d = K.lattice.d
    return (shell.volume / ball_volume(d, 1.0)) ** (1.0 / d)


def aux_distance_function(K: GridSet, h_offset: float) -> GridFunction:
    """
    ``[h_offset + dist(x, complement K) - dist(x, K)]^+`` on the lattice.

    Cells of ``K`` take values ``>= h_offset + h`` and cells outside take
    values ``<= h_offset - h``, so ``level_set(f, h_offset)`` is ``K``.
    """
    if not h_offset > 0:
        raise ValueError(f"h_offset must be > 0, got {h_offset}")
    inside = np.where(K.mask, distance_to_complement(K), 0.0)
    outside = distance_to(K)
    values = np.maximum(h_offset + inside - outside, 0.0)
    return GridFunction(K.lattice, values)


__all__ = [
    "I_functional",
    "symm_diff_volume",
    "delta_drop",
    "distance_to",
    "distance_to_complement",
    "hausdorff",
    "parallel_set",
    "parallel_radius",
    "aux_distance_function",
]
