"""
Exception hierarchy for the lab.

Every error raised on purpose by the library derives from
:class:`LabError`, so the experiment runner can abort a single trial
without hiding programming errors.
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for all lab errors."""


class AntipodalInputError(LabError):
    """The great circle between two antipodal directions is not unique."""


class LatticeMismatchError(LabError):
    """Two grid objects do not live on the same lattice."""


class NotLatticeCompatibleError(LabError):
    """A mirror hyperplane does not map the lattice onto itself."""


class AlreadySymmetricError(LabError):
    """The function already equals its symmetric decreasing rearrangement."""


class NoValidRhoError(LabError):
    """No lattice radius satisfies the modulus-of-continuity condition."""


class NotPositiveDefiniteError(LabError):
    """A matrix expected to be symmetric positive definite is not."""


class NotUnitDeterminantError(LabError):
    """A matrix expected to have determinant one does not."""


class RejectionBudgetExceededError(LabError):
    """A rejection sampler ran out of proposals."""


class PreconditionViolatedError(LabError):
    """A construction was called outside the range where it is valid."""


class UnsupportedSpecError(LabError):
    """A sampler spec cannot be used by the requested operation."""


class EmptySetError(LabError):
    """A set operation received an empty set."""


class EmptyParallelSetError(LabError):
    """An inner or outer parallel set is empty."""


class ConfigError(LabError):
    """Settings or an experiment config is malformed."""


__all__ = [
    "LabError",
    "AntipodalInputError",
    "LatticeMismatchError",
    "NotLatticeCompatibleError",
    "AlreadySymmetricError",
    "NoValidRhoError",
    "NotPositiveDefiniteError",
    "NotUnitDeterminantError",
    "RejectionBudgetExceededError",
    "PreconditionViolatedError",
    "UnsupportedSpecError",
    "EmptySetError",
    "EmptyParallelSetError",
    "ConfigError",
]
