"""
Grid functions and grid sets on a cell-centered lattice, together with
the symmetric decreasing rearrangement and the grid distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import ndimage

from polar_lab.functions.lattice import Lattice

_HEADER_FLOATS = np.dtype("<f8")
_HEADER_UINT = np.dtype("<u8")


@dataclass
class GridFunction:
    """
    Nonnegative function sampled at the cell centers of a lattice.

    Values outside the box ``[-L, L]^d`` are zero.

    :ivar lattice (Lattice): Sampling lattice.
    :ivar values (np.ndarray): Array of shape ``lattice.shape``.
    """

    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.lattice.shape:
            raise ValueError(
                f"values shape {values.shape} != {self.lattice.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        if np.any(values < 0):
            raise ValueError("grid values must be nonnegative")
        self.values = values

    @classmethod
    def zeros(cls, lattice: Lattice) -> "GridFunction":
        """The zero function."""
        return cls(lattice, np.zeros(lattice.shape))

    @classmethod
    def from_callable(
        cls, lattice: Lattice, fn: Callable[[np.ndarray], np.ndarray]
    ) -> "GridFunction":
        """Sample ``fn`` (vectorized over ``(..., d)``) at cell centers."""
        return cls(lattice, np.asarray(fn(lattice.centers), dtype=float))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        """Same lattice, new values."""
        return GridFunction(self.lattice, values)

    @property
    def sup(self) -> float:
        """``max f``."""
        return float(self.values.max())

    @property
    def mass(self) -> float:
        """Integral of ``f``."""
        return float(self.values.sum()) * self.lattice.cell_volume

    def evaluate(self, points) -> np.ndarray:
        """
        Multilinear interpolation at arbitrary points, zero outside the box.
        """
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, self.lattice.d)
        coords = self.lattice.to_index_coords(flat).T
        out = ndimage.map_coordinates(
            self.values, coords, order=1, mode="grid-constant", cval=0.0
        )
        out[~self.lattice.inside_box(flat)] = 0.0
        np.maximum(out, 0.0, out=out)
        return out.reshape(points.shape[:-1])

    def is_radially_nonincreasing(self) -> bool:
        """Whether values are nonincreasing along the radial cell order."""
        ordered = self.values.ravel()[self.lattice.radial_order]
        return bool(np.all(np.diff(ordered) <= 0.0))

    def dump(self, path: str | Path) -> Path:
        """Write the flat binary checkpoint format."""
        return dump_grid(self.lattice, self.values, path)

    @classmethod
    def load(cls, path: str | Path) -> "GridFunction":
        """Read a checkpoint written by :meth:`dump`."""
        lattice, values = load_grid(path)
        return cls(lattice, values)


@dataclass
class GridSet:
    """
    Set of lattice cells.

    :ivar lattice (Lattice): Lattice.
    :ivar mask (np.ndarray): Boolean membership, shape ``lattice.shape``.
    """

    lattice: Lattice
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != self.lattice.shape:
            raise ValueError(
                f"mask shape {mask.shape} != {self.lattice.shape}"
            )
        self.mask = mask

    @classmethod
    def from_predicate(
        cls, lattice: Lattice, predicate: Callable[[np.ndarray], np.ndarray]
    ) -> "GridSet":
        """Cells whose centers satisfy ``predicate``."""
        return cls(lattice, predicate(lattice.centers))

    @property
    def count(self) -> int:
        """Number of cells."""
        return int(self.mask.sum())

    @property
    def volume(self) -> float:
        """``count * h^d``."""
        return self.count * self.lattice.cell_volume

    def is_empty(self) -> bool:
        """Whether no cell belongs to the set."""
        return not bool(self.mask.any())

    def indicator(self) -> GridFunction:
        """The 0/1 grid function of the set."""
        return GridFunction(self.lattice, self.mask.astype(float))

    def boundary(self) -> "GridSet":
        """Member cells with a face neighbor outside the set."""
        structure = ndimage.generate_binary_structure(self.lattice.d, 1)
        interior = ndimage.binary_erosion(
            self.mask, structure=structure, border_value=0
        )
        return GridSet(self.lattice, self.mask & ~interior)

    def dump(self, path: str | Path) -> Path:
        """Write the indicator in the flat binary checkpoint format."""
        return dump_grid(self.lattice, self.mask.astype(float), path)

    @classmethod
    def load(cls, path: str | Path) -> "GridSet":
        """Read a checkpoint; cells with value > 1/2 are members."""
        lattice, values = load_grid(path)
        return cls(lattice, values > 0.5)


def dump_grid(lattice: Lattice, values: np.ndarray, path) -> Path:
    """
    Write ``d`` and ``L`` as 8-byte floats, ``n_cells`` as 8-byte unsigned,
    then the row-major values as 8-byte floats (little endian).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(np.array([lattice.d, lattice.L], _HEADER_FLOATS).tobytes())
        fh.write(np.array([lattice.n_cells], _HEADER_UINT).tobytes())
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    return path


def load_grid(path) -> tuple[Lattice, np.ndarray]:
    """
    Inverse of :func:`dump_grid`.

    :raises ValueError: If the payload size does not match the header.
    """
    raw = Path(path).read_bytes()
    d, L = np.frombuffer(raw[:16], _HEADER_FLOATS)
    (n_cells,) = np.frombuffer(raw[16:24], _HEADER_UINT)
    lattice = Lattice(int(d), float(L), int(n_cells))
    values = np.frombuffer(raw[24:], "<f8")
    if values.size != int(np.prod(lattice.shape)):
        raise ValueError(f"{path}: payload does not match header")
    return lattice, values.reshape(lattice.shape).astype(float)


def sdr_grid(f: GridFunction) -> GridFunction:
    """
    Symmetric decreasing rearrangement on the lattice.

    The cell values are sorted in decreasing order and assigned along
    the radial cell order, so the value multiset is kept bit-exact.
    """
    order = f.lattice.radial_order
    flat = np.empty(f.values.size)
    flat[order] = np.sort(f.values.ravel())[::-1]
    return f.with_values(flat.reshape(f.lattice.shape))


def sdr_set(A: GridSet) -> GridSet:
    """The ``|A|`` cells closest to the origin (radial order)."""
    order = A.lattice.radial_order
    flat = np.zeros(A.mask.size, dtype=bool)
    flat[order[: A.count]] = True
    return GridSet(A.lattice, flat.reshape(A.lattice.shape))


def sup_distance(f: GridFunction, g: GridFunction) -> float:
    """``max |f - g|`` over cells."""
    f.lattice.require_same(g.lattice)
    return float(np.max(np.abs(f.values - g.values)))


def l1_distance(f: GridFunction, g: GridFunction) -> float:
    """``h^d * sum |f - g|``."""
    f.lattice.require_same(g.lattice)
    total = float(np.sum(np.abs(f.values - g.values)))
    return total * f.lattice.cell_volume


def level_set(f: GridFunction, t: float) -> GridSet:
    """Cells with ``f > t``."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return GridSet(f.lattice, f.values > t)


def _half_offsets(d: int, reach: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Integer offsets ``k != 0`` with ``|k| <= reach`` whose first nonzero
    component is positive, and their norms.
    """
    m = int(np.floor(reach + 1e-9))
    if m < 1:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0)
    axes = [np.arange(-m, m + 1)] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    offsets = grid.reshape(-1, d)
    norms = np.linalg.norm(offsets, axis=1)
    keep = (norms > 0) & (norms <= reach + 1e-9)
    offsets, norms = offsets[keep], norms[keep]
    nonzero = offsets != 0
    first = offsets[np.arange(len(offsets)), np.argmax(nonzero, axis=1)]
    keep = first > 0
    return offsets[keep], norms[keep]


def modulus_profile(
    f: GridFunction, rho_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    Modulus of continuity at every pair distance up to ``rho_max``.

    Returns increasing distances and the modulus at each of them; the
    function is extended by zero outside the box.
    """
    h = f.lattice.h
    offsets, norms = _half_offsets(f.lattice.d, rho_max / h)
    if len(offsets) == 0:
        return np.zeros(0), np.zeros(0)

    pad = int(np.max(np.abs(offsets)))
    padded = np.pad(f.values, pad)
    diffs = np.empty(len(offsets))
    all_axes = tuple(range(f.lattice.d))
    for i, k in enumerate(offsets):
        # padding >= |k_i| so wrapped entries are zeros
        shifted = np.roll(padded, tuple(int(c) for c in k), axis=all_axes)
        diffs[i] = float(np.max(np.abs(padded - shifted)))

    order = np.argsort(norms, kind="stable")
    norms, diffs = norms[order] * h, np.maximum.accumulate(diffs[order])
    distances, last = np.unique(norms[::-1], return_index=True)
    eta = diffs[::-1][last]
    return distances, eta


def modulus_of_continuity(f: GridFunction, rho: float) -> float:
    """``max |f(x) - f(y)|`` over cell pairs with ``|x - y| <= rho``."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    _, eta = modulus_profile(f, rho)
    return float(eta[-1]) if len(eta) else 0.0


__all__ = [
    "GridFunction",
    "GridSet",
    "dump_grid",
    "load_grid",
    "sdr_grid",
    "sdr_set",
    "sup_distance",
    "l1_distance",
    "level_set",
    "modulus_profile",
    "modulus_of_continuity",
]
