"""
Numeric constants and tolerances shared by the lab.
"""

from __future__ import annotations

from polar_lab.utils import find_project_root

PROJECT_ROOT = find_project_root()
SETTINGS_PATH = PROJECT_ROOT / "settings" / "settings.yml"
EXPERIMENTS_DIR = PROJECT_ROOT / "settings" / "experiments"

# Geometry
BOUNDARY_TOL = 1e-12  # on |x|^2 - |sigma x|^2
DIRECTION_TOL = 1e-12
SYMMETRIC_TOL = 1e-10
LATTICE_TOL = 1e-9  # mirror offsets vs. cell width

# Orbits
ORBIT_DEDUP_TOL = 1e-9
DIRECTION_DISTINCT_TOL = 1e-10
RATIONAL_ANGLE_TOL = 1e-9

# Eigen solver
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 64

# Sampling
GAUSSIAN_TABLE_NODES = 2**16
GAUSSIAN_TAIL_MASS = 1e-14
REJECTION_BUDGET = 1_000_000
REJECTION_BATCH = 4096

# Reporting
CSV_DIGITS = 17
STANDARD_ERRORS = 3.0
