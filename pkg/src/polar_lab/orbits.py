"""
Orbits of folding maps on the direction sphere.

The folding map of a direction ``u`` fixes ``{<x, u> <= 0}`` and reflects
the other half through the hyperplane ``u^perp``.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.optimize import linprog
from scipy.spatial import cKDTree
from scipy.stats import norm, qmc

from polar_lab.constants import (
    CSV_DIGITS,
    DIRECTION_DISTINCT_TOL,
    ORBIT_DEDUP_TOL,
    RATIONAL_ANGLE_TOL,
)
from polar_lab.geometry import PolarParam, fold
from polar_lab.utils import logger

ORTHOGONAL_TOL = 1e-10
DEFAULT_PROBES = 4096


@dataclass(frozen=True)
class DirectionSet:
    """
    Finite set ``G`` of unit directions.

    :ivar directions (np.ndarray): ``(m, d)`` array of unit vectors.
    """

    directions: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if g.size == 0:
            raise ValueError("direction set must be nonempty")
        norms = np.linalg.norm(g, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("directions must be nonzero")
        g = g / norms[:, None]
        if cKDTree(g).query_pairs(DIRECTION_DISTINCT_TOL):
            raise ValueError("directions must be pairwise distinct")
        object.__setattr__(self, "directions", g)

    @classmethod
    def from_angles(cls, angles) -> "DirectionSet":
        """Planar directions at the given angles (radians)."""
        angles = np.asarray(angles, dtype=float)
        return cls(np.stack([np.cos(angles), np.sin(angles)], axis=1))

    @property
    def dimension(self) -> int:
        """Ambient dimension."""
        return int(self.directions.shape[1])

    def __len__(self) -> int:
        return int(self.directions.shape[0])


class _DedupIndex:
    """Hash grid of cell size ``tol`` answering 'is there a point within
    ``tol``'."""

    def __init__(self, d: int, tol: float):
        self.tol = tol
        self.points: list[np.ndarray] = []
        self._cells: dict[tuple[int, ...], list[int]] = {}
        self._neighbors = list(itertools.product((-1, 0, 1), repeat=d))

    def _key(self, p: np.ndarray) -> tuple[int, ...]:
        return tuple(int(c) for c in np.floor(p / self.tol))

    def add(self, p: np.ndarray) -> bool:
        """Insert ``p`` unless a stored point lies within ``tol``."""
        key = self._key(p)
        for offset in self._neighbors:
            cell = tuple(k + o for k, o in zip(key, offset))
            for j in self._cells.get(cell, ()):
                if np.linalg.norm(self.points[j] - p) <= self.tol:
                    return False
        self._cells.setdefault(key, []).append(len(self.points))
        self.points.append(p)
        return True


def orbit_expand(
    G: DirectionSet,
    x,
    budget: int,
    *,
    tol: float = ORBIT_DEDUP_TOL,
) -> np.ndarray:
    """
    Breadth-first closure of ``{x}`` under the folding maps of ``G``.

    Points closer than ``tol`` are merged. The result is in BFS order, so
    a smaller budget yields a prefix of a larger one.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    index = _DedupIndex(G.dimension, tol)
    index.add(x)
    frontier = [x]
    mirrors = [PolarParam(0.0, u) for u in G.directions]

    while frontier and len(index.points) < budget:
        block = np.asarray(frontier)
        images = np.stack([fold(m, block) for m in mirrors], axis=1)
        images /= np.linalg.norm(images, axis=-1, keepdims=True)
        frontier = []
        for p in images.reshape(-1, G.dimension):
            if len(index.points) >= budget:
                break
            if index.add(p):
                frontier.append(p)

    logger.debug(f"orbit of size {len(index.points)} (budget {budget})")
    return np.asarray(index.points)


def probe_points(d: int, probes: int) -> np.ndarray:
    """
    Quasi-uniform points on the sphere: equispaced on the circle, a
    Fibonacci lattice on S^2, Gaussian-quantile Halton points otherwise.
    """
    if probes < 1:
        raise ValueError(f"probes must be >= 1, got {probes}")
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        theta = 2.0 * np.pi * np.arange(probes) / probes
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if d == 3:
        k = np.arange(probes) + 0.5
        z = 1.0 - 2.0 * k / probes
        phi = np.pi * (1.0 + math.sqrt(5.0)) * k
        rho = np.sqrt(1.0 - z * z)
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    points = qmc.Halton(d=d, scramble=False).random(probes + 1)[1:]
    g = norm.ppf(points)
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def covering_radius(sample, probes: int = DEFAULT_PROBES) -> float:
    """
    Largest angular distance from a probe point to the nearest sample
    point.
    """
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    if sample.size == 0:
        raise ValueError("sample must be nonempty")
    grid = probe_points(sample.shape[1], probes)
    chord, _ = cKDTree(sample).query(grid)
    angles = 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))
    return float(np.max(angles))


@dataclass(frozen=True)
class GeneratingReport:
    """
    Screening of the conditions for a generating set of directions.

    :ivar spans (bool): ``G`` spans R^d.
    :ivar positive_span (bool): Nonnegative combinations of ``G`` cover
        R^d, so no direction is left fixed by every fold.
    :ivar connected (bool): No split of ``G`` into mutually orthogonal
        parts.
    :ivar irrational_angle (bool): Some pairwise angle is far from every
        ``p pi / q`` with ``q <= Q``. Heuristic.
    :ivar witness (float | None): Such an angle, if found.
    """

    spans: bool
    positive_span: bool
    connected: bool
    irrational_angle: bool
    witness: float | None = None

    def to_dict(self) -> dict:
        """JSON-friendly form."""
        return {
            "spans": self.spans,
            "positive_span": self.positive_span,
            "connected": self.connected,
            "irrational_angle (heuristic)": self.irrational_angle,
            "witness": self.witness,
        }


def positively_spans(G: DirectionSet) -> bool:
    """
    Whether every point of R^d is a nonnegative combination of ``G``.

    Holds iff ``G`` spans R^d and some combination with all weights
    ``>= 1`` vanishes.
    """
    g = G.directions
    if int(np.linalg.matrix_rank(g, tol=1e-10)) != G.dimension:
        return False
    result = linprog(
        np.zeros(len(G)),
        A_eq=g.T,
        b_eq=np.zeros(G.dimension),
        bounds=[(1.0, None)] * len(G),
        method="highs",
    )
    return bool(result.status == 0)


def generating_heuristics(
    G: DirectionSet, Q: int, *, tol: float = RATIONAL_ANGLE_TOL
) -> GeneratingReport:
    """Rank, connectivity and rationality screens for ``G``."""
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    g = G.directions
    spans = int(np.linalg.matrix_rank(g, tol=1e-10)) == G.dimension

    gram = g @ g.T
    adjacency = csr_matrix(np.abs(gram) > ORTHOGONAL_TOL)
    n_parts, _ = connected_components(adjacency, directed=False)

    witness = None
    for i, j in itertools.combinations(range(len(G)), 2):
        theta = math.acos(float(np.clip(gram[i, j], -1.0, 1.0)))
        ratio = theta / math.pi
        best = Fraction(ratio).limit_denominator(Q)
        if abs(ratio - float(best)) * math.pi > tol:
            witness = theta
            break
    return GeneratingReport(
        spans=spans,
        positive_span=spans and positively_spans(G),
        connected=n_parts == 1,
        irrational_angle=witness is not None,
        witness=witness,
    )


def write_orbit_csv(points, path: str | Path) -> Path:
    """Write unit-vector rows with a ``u1..ud`` header."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"u{k + 1}" for k in range(points.shape[1])])
        for row in points:
            writer.writerow([f"{c:.{CSV_DIGITS}g}" for c in row])
    return path


__all__ = [
    "DirectionSet",
    "orbit_expand",
    "probe_points",
    "covering_radius",
    "GeneratingReport",
    "positively_spans",
    "generating_heuristics",
    "write_orbit_csv",
]
