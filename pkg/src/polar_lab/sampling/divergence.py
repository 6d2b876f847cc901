"""
Partial sums of the per-family lower bounds whose divergence makes a
sampler schedule converge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polar_lab.errors import UnsupportedSpecError
from polar_lab.sampling.specs import GaussianPolar, PoissonDirection


@dataclass(frozen=True)
class DivergenceAudit:
    """
    Result of :func:`divergence_audit`.

    :ivar family (str): Sampler kind.
    :ivar rho (float): Target radius the audit was run for.
    :ivar L (float): Support radius.
    :ivar terms (np.ndarray): Per-step lower-bound terms.
    :ivar partial_sums (np.ndarray): Cumulative sums of ``terms``.
    :ivar monotone (bool): Whether the partial sums never decrease.
    """

    family: str
    rho: float
    L: float
    terms: np.ndarray
    partial_sums: np.ndarray
    monotone: bool

    def first_exceeding(self, threshold: float) -> int | None:
        """Smallest ``N`` with partial sum above ``threshold``."""
        idx = int(np.searchsorted(self.partial_sums, threshold, "right"))
        if idx >= len(self.partial_sums):
            return None
        return idx + 1

    def growth(self) -> float:
        """Increase of the partial sums over the second half."""
        n = len(self.partial_sums)
        if n < 2:
            return float(self.partial_sums[-1]) if n else 0.0
        return float(self.partial_sums[-1] - self.partial_sums[n // 2 - 1])


def divergence_audit(spec, rho: float, L: float, N: int) -> DivergenceAudit:
    """
    First ``N`` partial sums of ``t_i^(-d/2) exp(-2 L^2 / t_i)`` (Gaussian
    family) or ``1 - |z_i|`` (Poisson family).

    :raises UnsupportedSpecError: For any other family.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not rho > 0 or not L > 0:
        raise ValueError("rho and L must be positive")
    if isinstance(spec, GaussianPolar):
        t = spec.schedule.values(N)
        with np.errstate(divide="ignore", over="ignore"):
            terms = np.where(
                t > 0, t ** (-spec.d / 2.0) * np.exp(-2.0 * L**2 / t), 0.0
            )
    elif isinstance(spec, PoissonDirection):
        # the pole direction is normalized, so |z_i| is the schedule
        terms = 1.0 - spec.schedule.values(N)
    else:
        raise UnsupportedSpecError(
            f"no divergence bound for {type(spec).__name__}"
        )
    sums = np.cumsum(terms)
    return DivergenceAudit(
        family=spec.kind,
        rho=float(rho),
        L=float(L),
        terms=terms,
        partial_sums=sums,
        monotone=bool(np.all(np.diff(sums) >= 0.0)),
    )


__all__ = ["DivergenceAudit", "divergence_audit"]
