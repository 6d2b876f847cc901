"""
Function representations: grid functions and sets, cones, ellipsoids.
"""

from __future__ import annotations

from .cone import ConeFunction, sdr_cone
from .ellipsoid import EllipsoidFunction, require_spd, sdr_ellipsoid
from .grid import (
    GridFunction,
    GridSet,
    l1_distance,
    level_set,
    modulus_of_continuity,
    modulus_profile,
    sdr_grid,
    sdr_set,
    sup_distance,
)
from .lattice import Lattice

__all__ = [
    "Lattice",
    "GridFunction",
    "GridSet",
    "ConeFunction",
    "EllipsoidFunction",
    "sdr_grid",
    "sdr_set",
    "sdr_cone",
    "sdr_ellipsoid",
    "require_spd",
    "sup_distance",
    "l1_distance",
    "level_set",
    "modulus_profile",
    "modulus_of_continuity",
]
