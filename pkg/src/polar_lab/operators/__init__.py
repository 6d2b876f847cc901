"""
Symmetrization operators.
"""

from __future__ import annotations

from .polarize import (
    I_drop_identity,
    PolarizeMode,
    drop_lower_bound_uniform,
    polarize_cone,
    polarize_grid,
    polarize_set,
    telescoping_drops,
    weak_tail_bound,
)
from .steiner import (
    drop_lower_bound_steiner,
    eigen_gap,
    ellipsoid_to_ball,
    eval_gap_bound,
    steiner_ellipsoid,
    steiner_grid,
)

__all__ = [
    "PolarizeMode",
    "polarize_grid",
    "polarize_set",
    "polarize_cone",
    "I_drop_identity",
    "telescoping_drops",
    "drop_lower_bound_uniform",
    "weak_tail_bound",
    "steiner_grid",
    "steiner_ellipsoid",
    "ellipsoid_to_ball",
    "drop_lower_bound_steiner",
    "eigen_gap",
    "eval_gap_bound",
]
