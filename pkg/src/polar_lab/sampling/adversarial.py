"""
Feedback samplers that read the current state before every draw.

Both rules interleave a dense base sequence with steps of their own, so
the emitted sequence is dense while the symmetrizations never converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm, qmc

from polar_lab.eigen import jacobi_eigh
from polar_lab.errors import AntipodalInputError, PreconditionViolatedError
from polar_lab.geometry import (
    PolarParam,
    Side,
    angular_distance,
    as_direction,
    fold,
    great_circle_step,
    half_space_side,
    orthogonal_to,
)
from polar_lab.sampling.specs import (
    AdversarialCone,
    AdversarialSteiner,
    BaseSequence,
)


@dataclass
class BaseEnumerator:
    """
    Materializes a :class:`BaseSequence` on demand (1-based indices).

    Halton points are mapped to radii in ``(0, 2L)`` and to directions by
    normalizing their Gaussian quantiles.

    :ivar base (BaseSequence): Sequence description.
    :ivar d (int): Dimension.
    :ivar L (float): Radius scale for polar items.
    """

    base: BaseSequence
    d: int
    L: float = 1.0
    _points: np.ndarray = field(
        default_factory=lambda: np.zeros((0, 0)), repr=False
    )

    def _halton(self, n: int) -> np.ndarray:
        if len(self._points) <= n:
            size = max(2 * n, 64)
            sampler = qmc.Halton(d=self.d + 1, scramble=False)
            self._points = sampler.random(size + 1)
        return self._points[n]

    def polar(self, n: int) -> PolarParam:
        """The ``n``-th base parameter."""
        if self.base.kind == "halton":
            point = self._halton(n)
            return PolarParam(
                2.0 * self.L * float(point[0]),
                as_direction(norm.ppf(point[1:])),
            )
        r, u = self.base.items[(n - 1) % len(self.base.items)]
        return PolarParam(r, np.asarray(u, dtype=float))

    def direction(self, n: int) -> np.ndarray:
        """The ``n``-th base direction."""
        return self.polar(n).u


@dataclass
class AdversarialConeSampler:
    """
    Odd steps shrink the radius of the next base parameter and pick the
    sign after which the base parameter leaves the apex fixed, keeping
    the apex farthest from the origin; even steps emit the base
    parameter unchanged.

    :ivar spec (AdversarialCone): Rule parameters.
    :ivar emitted (list[PolarParam]): Every parameter handed out.
    """

    spec: AdversarialCone
    emitted: list[PolarParam] = field(default_factory=list)
    _base: BaseEnumerator = field(init=False, repr=False)

    def __post_init__(self):
        self._base = BaseEnumerator(self.spec.base, self.spec.d, self.spec.L)

    def base_item(self, n: int) -> PolarParam:
        """The ``n``-th base parameter."""
        return self._base.polar(n)

    def draw(self, i: int, apex: np.ndarray) -> PolarParam:
        """
        Parameter of step ``i`` given the current cone apex.

        :raises PreconditionViolatedError: If ``epsilon >= |apex|`` at the
            first step.
        """
        apex = np.asarray(apex, dtype=float)
        if i == 1 and not self.spec.epsilon < float(np.linalg.norm(apex)):
            raise PreconditionViolatedError(
                f"epsilon={self.spec.epsilon} must be < |apex|"
            )
        n = (i + 1) // 2
        omega = self.base_item(n)
        if i % 2 == 0:
            self.emitted.append(omega)
            return omega

        radius = min(2.0**-n * self.spec.epsilon, omega.r)
        chosen, kept = PolarParam(radius, omega.u), -1.0
        for sign in (1.0, -1.0):
            candidate = PolarParam(radius, sign * omega.u)
            moved = fold(candidate, apex)
            if half_space_side(omega, moved) == Side.NEGATIVE:
                continue
            norm_moved = float(np.linalg.norm(moved))
            if norm_moved > kept:
                chosen, kept = candidate, norm_moved
        self.emitted.append(chosen)
        return chosen

    def base_positions(self) -> list[int]:
        """Emitted positions (1-based) that carry base items."""
        return list(range(2, len(self.emitted) + 1, 2))


@dataclass
class AdversarialSteinerWalker:
    """
    Walks along great circles from a maximizing eigenvector toward the
    base directions, ``epsilon / n`` radians per step.

    :ivar spec (AdversarialSteiner): Rule parameters.
    :ivar emitted (list[np.ndarray]): Every direction handed out.
    :ivar served (list[int]): Emitted positions (1-based) that carry
        base items, in base order.
    """

    spec: AdversarialSteiner
    emitted: list[np.ndarray] = field(default_factory=list)
    served: list[int] = field(default_factory=list)
    _base: BaseEnumerator = field(init=False, repr=False)
    _next_base: int = field(default=1, init=False, repr=False)

    def __post_init__(self):
        self._base = BaseEnumerator(self.spec.base, self.spec.d)

    def base_item(self, n: int) -> np.ndarray:
        """The ``n``-th base direction."""
        return self._base.direction(n)

    def _start(self, matrix: np.ndarray) -> np.ndarray:
        values, vectors = jacobi_eigh(matrix)
        c = 1.0 + float(values[-1] / values[0])
        if not (c + 2.0) * math.sin(self.spec.epsilon) ** 2 < 1.0:
            raise PreconditionViolatedError(
                f"(C + 2) sin^2(eps) >= 1 with C={c}, eps={self.spec.epsilon}"
            )
        return as_direction(vectors[:, -1])

    def draw(self, i: int, matrix: np.ndarray) -> np.ndarray:
        """
        Direction of step ``i`` given the current ellipsoid matrix.

        :raises PreconditionViolatedError: If ``epsilon`` is too large for
            the initial matrix.
        """
        del i
        n = len(self.emitted)
        if n == 0:
            v = self._start(np.asarray(matrix, dtype=float))
        else:
            step = self.spec.epsilon / n
            current = self.emitted[-1]
            target = self.base_item(self._next_base)
            if angular_distance(current, target) <= step:
                v = target
                self.served.append(n + 1)
                self._next_base += 1
            else:
                try:
                    v = great_circle_step(current, target, step)
                except AntipodalInputError:
                    v = great_circle_step(
                        current, orthogonal_to(current), step
                    )
        self.emitted.append(v)
        return v

    def base_positions(self) -> list[int]:
        """Emitted positions (1-based) that carry base items."""
        return list(self.served)


__all__ = [
    "BaseEnumerator",
    "AdversarialConeSampler",
    "AdversarialSteinerWalker",
]
