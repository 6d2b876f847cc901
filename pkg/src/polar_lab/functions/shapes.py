"""
Initial data built from JSON templates.

A template is a mapping with a ``kind`` key plus kind-specific fields,
for example ``{"kind": "disk", "radius": 1.0, "center": [0.5, 0]}``.
"""

from __future__ import annotations

import math
from typing import Any, Callable

import numpy as np

from polar_lab.errors import ConfigError
from polar_lab.functions.cone import ConeFunction
from polar_lab.functions.ellipsoid import EllipsoidFunction
from polar_lab.functions.grid import GridFunction, GridSet
from polar_lab.functions.lattice import Lattice
from polar_lab.geometry import ball_volume, sphere_area

SetBuilder = Callable[[dict[str, Any], Lattice, np.random.Generator], GridSet]


def _center(template: dict[str, Any], d: int) -> np.ndarray:
    center = np.asarray(template.get("center", [0.0] * d), dtype=float)
    if center.shape != (d,):
        raise ConfigError(f"center must have {d} coordinates")
    return center


def _disk(template, lattice, _rng) -> GridSet:
    center = _center(template, lattice.d)
    radius = float(template.get("radius", 1.0))
    return GridSet.from_predicate(
        lattice, lambda x: np.linalg.norm(x - center, axis=-1) < radius
    )


def _rectangle(template, lattice, _rng) -> GridSet:
    center = _center(template, lattice.d)
    if "side" in template:
        sides = np.full(lattice.d, float(template["side"]))
    else:
        sides = np.asarray(template.get("sides"), dtype=float)
    if sides.shape != (lattice.d,):
        raise ConfigError(f"rectangle needs {lattice.d} side lengths")
    return GridSet.from_predicate(
        lattice,
        lambda x: np.all(np.abs(x - center) < sides / 2.0, axis=-1),
    )


def _annulus(template, lattice, _rng) -> GridSet:
    if lattice.d != 2:
        raise ConfigError("annulus is a planar shape")
    center = _center(template, 2)
    inner = float(template.get("inner", 0.5))
    outer = float(template.get("outer", 1.0))
    notch = float(template.get("notch", 0.0))
    notch_angle = float(template.get("notch_angle", 0.0))

    def _member(x: np.ndarray) -> np.ndarray:
        rel = x - center
        r = np.linalg.norm(rel, axis=-1)
        theta = np.arctan2(rel[..., 1], rel[..., 0]) - notch_angle
        theta = np.abs((theta + np.pi) % (2.0 * np.pi) - np.pi)
        return (r >= inner) & (r < outer) & (theta >= notch / 2.0)

    return GridSet.from_predicate(lattice, _member)


def _random_cells(template, lattice, rng) -> GridSet:
    radius = float(template.get("radius", lattice.L / 2.0))
    count = int(template.get("count", 20))
    candidates = np.flatnonzero(lattice.radii.ravel() < radius)
    if count > len(candidates):
        raise ConfigError(f"only {len(candidates)} cells within {radius}")
    chosen = rng.choice(candidates, size=count, replace=False)
    mask = np.zeros(lattice.radii.size, dtype=bool)
    mask[chosen] = True
    return GridSet(lattice, mask.reshape(lattice.shape))


SET_BUILDERS: dict[str, SetBuilder] = {
    "disk": _disk,
    "square": _rectangle,
    "rectangle": _rectangle,
    "annulus": _annulus,
    "random-cells": _random_cells,
}


def _kind(template: dict[str, Any]) -> str:
    kind = str(template.get("kind", "")).strip().lower()
    if not kind:
        raise ConfigError("initial data template needs a 'kind'")
    return kind


def build_set(
    template: dict[str, Any],
    lattice: Lattice,
    rng: np.random.Generator | None = None,
) -> GridSet:
    """Build a grid set from a template."""
    kind = _kind(template)
    builder = SET_BUILDERS.get(kind)
    if builder is None:
        raise ConfigError(f"unknown set kind '{kind}'")
    return builder(template, lattice, rng or np.random.default_rng(0))


def build_cone(template: dict[str, Any], d: int) -> ConeFunction:
    """Exact cone from ``{"kind": "cone", "apex": [...]}``."""
    apex = np.asarray(template.get("apex", [0.0] * d), dtype=float)
    if apex.shape != (d,):
        raise ConfigError(f"apex must have {d} coordinates")
    return ConeFunction(apex)


def build_ellipsoid(template: dict[str, Any], d: int) -> EllipsoidFunction:
    """
    Exact ellipsoid from ``{"kind": "ellipsoid", "matrix": ...}`` or
    ``{"kind": "ellipsoid", "diagonal": [...]}``, optionally normalized
    with ``"ratio_cap"``.
    """
    if "matrix" in template:
        matrix = np.asarray(template["matrix"], dtype=float)
    elif "diagonal" in template:
        matrix = np.diag(np.asarray(template["diagonal"], dtype=float))
    else:
        raise ConfigError("ellipsoid needs 'matrix' or 'diagonal'")
    if matrix.shape != (d, d):
        raise ConfigError(f"ellipsoid matrix must be {d}x{d}")
    ellipsoid = EllipsoidFunction(matrix)
    if template.get("ratio_cap") is not None:
        ellipsoid = ellipsoid.normalized(float(template["ratio_cap"]))
    return ellipsoid


def build_grid(
    template: dict[str, Any],
    lattice: Lattice,
    rng: np.random.Generator | None = None,
) -> GridFunction:
    """
    Build a grid function from a template.

    ``cone`` accepts a ``radius`` (``[radius - |x - a|]^+``, Lipschitz 1),
    ``random`` draws uniform values on the cells within ``radius``, and
    any set kind yields its indicator.
    """
    kind = _kind(template)
    d = lattice.d
    if kind == "cone":
        apex = build_cone(template, d).apex
        radius = float(template.get("radius", 1.0))
        return GridFunction.from_callable(
            lattice,
            lambda x: np.maximum(
                radius - np.linalg.norm(x - apex, axis=-1), 0.0
            ),
        )
    if kind == "ellipsoid":
        return build_ellipsoid(template, d).to_grid(lattice)
    if kind == "random":
        rng = rng or np.random.default_rng(0)
        radius = float(template.get("radius", lattice.L / 2.0))
        values = rng.random(lattice.shape)
        values[lattice.radii >= radius] = 0.0
        return GridFunction(lattice, values)
    return build_set(template, lattice, rng).indicator()


def perimeter(template: dict[str, Any], d: int) -> float | None:
    """
    Analytic surface measure of a set template, or ``None`` if unknown.

    An explicit ``"perimeter"`` entry wins.
    """
    if template.get("perimeter") is not None:
        return float(template["perimeter"])
    kind = _kind(template)
    if kind == "disk":
        return sphere_area(d) * float(template.get("radius", 1.0)) ** (d - 1)
    if kind in ("square", "rectangle"):
        if "side" in template:
            sides = [float(template["side"])] * d
        else:
            sides = [float(s) for s in template["sides"]]
        total = 0.0
        for k in range(d):
            total += 2.0 * math.prod(s for i, s in enumerate(sides) if i != k)
        return total
    if kind == "annulus" and d == 2:
        inner = float(template.get("inner", 0.5))
        outer = float(template.get("outer", 1.0))
        notch = float(template.get("notch", 0.0))
        arcs = (2.0 * math.pi - notch) * (inner + outer)
        return arcs + (2.0 * (outer - inner) if notch > 0 else 0.0)
    return None


def volume(template: dict[str, Any], d: int) -> float | None:
    """Analytic volume of a set template, or ``None`` if unknown."""
    kind = _kind(template)
    if kind == "disk":
        return ball_volume(d, float(template.get("radius", 1.0)))
    if kind in ("square", "rectangle"):
        if "side" in template:
            return float(template["side"]) ** d
        return math.prod(float(s) for s in template["sides"])
    if kind == "annulus" and d == 2:
        inner = float(template.get("inner", 0.5))
        outer = float(template.get("outer", 1.0))
        notch = float(template.get("notch", 0.0))
        return 0.5 * (2.0 * math.pi - notch) * (outer**2 - inner**2)
    return None


__all__ = [
    "SET_BUILDERS",
    "build_set",
    "build_cone",
    "build_ellipsoid",
    "build_grid",
    "perimeter",
    "volume",
]
