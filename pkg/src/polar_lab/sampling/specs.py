"""
Sampler specifications: tagged descriptions of the laws (or adversarial
rules) that produce the parameter sequence ``W_1, W_2, ...``.

Every spec round-trips through the JSON experiment config via
:func:`spec_from_dict` and ``to_dict``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, ClassVar, Union

import numpy as np

from polar_lab.constants import DIRECTION_TOL
from polar_lab.errors import ConfigError


@dataclass(frozen=True)
class Schedule:
    """
    Step-dependent positive parameter ``s_i``.

    :ivar kind (str): ``constant``, ``power`` (``scale * i ** exponent``),
        ``inverse-loglog`` (``scale / log log max(i, 3)``) or
        ``harmonic`` (``scale * (1 - 1 / i)``).
    :ivar scale (float): Multiplier.
    :ivar exponent (float): Exponent of the ``power`` kind.
    """

    KINDS: ClassVar[tuple[str, ...]] = (
        "constant",
        "power",
        "inverse-loglog",
        "harmonic",
    )

    kind: str = "constant"
    scale: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown schedule kind '{self.kind}'")
        if not self.scale > 0:
            raise ConfigError(f"schedule scale must be > 0: {self.scale}")

    def values(self, n: int) -> np.ndarray:
        """``s_1, ..., s_n``."""
        i = np.arange(1, n + 1, dtype=float)
        if self.kind == "constant":
            return np.full(n, self.scale)
        if self.kind == "power":
            return self.scale * i**self.exponent
        if self.kind == "inverse-loglog":
            return self.scale / np.log(np.log(np.maximum(i, 3.0)))
        return self.scale * (1.0 - 1.0 / i)

    def __call__(self, i: int) -> float:
        if i < 1:
            raise ValueError(f"step index must be >= 1, got {i}")
        if self.kind == "constant":
            return self.scale
        if self.kind == "power":
            return self.scale * float(i) ** self.exponent
        if self.kind == "inverse-loglog":
            return self.scale / math.log(math.log(max(i, 3)))
        return self.scale * (1.0 - 1.0 / i)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "Schedule":
        """Parse ``{"kind": ..., "scale": ..., "exponent": ...}``."""
        return cls(
            kind=str(payload.get("kind", "constant")),
            scale=float(payload.get("scale", 1.0)),
            exponent=float(payload.get("exponent", 1.0)),
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly form."""
        return {
            "kind": self.kind,
            "scale": self.scale,
            "exponent": self.exponent,
        }


@dataclass(frozen=True)
class RadialLaw:
    """
    Continuous law of the radius for finite direction sets.

    :ivar kind (str): ``uniform`` on ``(0, scale)`` or ``exponential``
        with mean ``scale``.
    :ivar scale (float): Law parameter.
    """

    kind: str = "uniform"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "exponential"):
            raise ConfigError(f"unknown radial law '{self.kind}'")
        if not self.scale > 0:
            raise ConfigError(f"radial scale must be > 0: {self.scale}")


@dataclass(frozen=True)
class BaseSequence:
    """
    Deterministic base sequence of adversarial samplers.

    :ivar kind (str): ``halton`` (dense), ``constant`` or ``list``.
    :ivar items (tuple): ``(r, u)`` pairs for ``constant`` / ``list``;
        ``r`` is ignored by direction samplers.
    """

    kind: str = "halton"
    items: tuple[tuple[float, tuple[float, ...]], ...] = ()

    def __post_init__(self):
        if self.kind not in ("halton", "constant", "list"):
            raise ConfigError(f"unknown base sequence '{self.kind}'")
        if self.kind != "halton" and not self.items:
            raise ConfigError(f"'{self.kind}' base sequence needs items")

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "BaseSequence":
        """Parse ``{"kind": "halton"}`` or explicit items."""
        kind = str(payload.get("kind", "halton"))
        if kind == "constant":
            raw = [payload]
        else:
            raw = payload.get("items", [])
        items = tuple(
            (float(item.get("r", 0.0)), tuple(float(c) for c in item["u"]))
            for item in raw
        )
        return cls(kind=kind, items=items)

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly form."""
        if self.kind == "halton":
            return {"kind": "halton"}
        items = [{"r": r, "u": list(u)} for r, u in self.items]
        if self.kind == "constant":
            return {"kind": "constant", **items[0]}
        return {"kind": "list", "items": items}


@dataclass(frozen=True)
class UniformPolar:
    """``r`` uniform on ``(0, 2L)``, ``u`` uniform on the sphere."""

    kind: ClassVar[str] = "uniform-polar"
    d: int
    L: float

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigError(f"L must be > 0, got {self.L}")


@dataclass(frozen=True)
class UniformDirection:
    """``u`` uniform on the sphere (Steiner directions)."""

    kind: ClassVar[str] = "uniform-direction"
    d: int


@dataclass(frozen=True)
class GaussianPolar:
    """Radial density proportional to ``exp(-r^2 / 2 t_i) r^(d-1)``."""

    kind: ClassVar[str] = "gaussian-polar"
    d: int
    schedule: Schedule


@dataclass(frozen=True)
class PoissonDirection:
    """Poisson-kernel law on the sphere with pole ``z_i = s_i * axis``."""

    kind: ClassVar[str] = "poisson-direction"
    d: int
    schedule: Schedule
    axis: tuple[float, ...] = ()

    def pole(self, i: int) -> np.ndarray:
        """``z_i``; ``|z_i| < 1`` is required."""
        axis = np.asarray(self.axis or (1.0,) + (0.0,) * (self.d - 1))
        z = self.schedule(i) * axis / np.linalg.norm(axis)
        if not np.linalg.norm(z) < 1.0:
            raise ValueError(f"Poisson pole must lie in the unit ball: {z}")
        return z


@dataclass(frozen=True)
class FiniteIID:
    """Directions drawn from a finite set, radius from a continuous law."""

    kind: ClassVar[str] = "finite-iid"
    d: int
    directions: tuple[tuple[float, ...], ...]
    radial: RadialLaw = field(default_factory=RadialLaw)
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.directions:
            raise ConfigError("finite direction set must be nonempty")
        for u in self.directions:
            if len(u) != self.d:
                raise ConfigError(f"direction {u} is not {self.d}-dimensional")
            if abs(math.hypot(*u) - 1.0) > 1e3 * DIRECTION_TOL:
                raise ConfigError(f"direction {u} is not a unit vector")
        if self.weights and len(self.weights) != len(self.directions):
            raise ConfigError("weights must match directions")
        if self.weights and (
            min(self.weights) < 0 or not sum(self.weights) > 0
        ):
            raise ConfigError("weights must be >= 0 with a positive sum")

    def direction_array(self) -> np.ndarray:
        """Directions as an ``(m, d)`` array."""
        return np.asarray(self.directions, dtype=float)


@dataclass(frozen=True)
class AdversarialCone:
    """Feedback rule keeping a cone apex away from the origin."""

    kind: ClassVar[str] = "adversarial-cone"
    d: int
    L: float
    epsilon: float
    base: BaseSequence = field(default_factory=BaseSequence)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class AdversarialSteiner:
    """Feedback rule keeping an ellipsoid's eigenvalue gap open."""

    kind: ClassVar[str] = "adversarial-steiner"
    d: int
    epsilon: float
    base: BaseSequence = field(default_factory=BaseSequence)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")


SamplerSpec = Union[
    UniformPolar,
    UniformDirection,
    GaussianPolar,
    PoissonDirection,
    FiniteIID,
    AdversarialCone,
    AdversarialSteiner,
]

ADVERSARIAL_KINDS = (AdversarialCone.kind, AdversarialSteiner.kind)
DIRECTION_KINDS = (
    UniformDirection.kind,
    PoissonDirection.kind,
    AdversarialSteiner.kind,
)


def _normalized(rows) -> tuple[tuple[float, ...], ...]:
    out = []
    for row in rows:
        v = np.asarray(row, dtype=float)
        v = v / np.linalg.norm(v)
        out.append(tuple(float(c) for c in v))
    return tuple(out)


def spec_from_dict(payload: dict[str, Any], d: int) -> SamplerSpec:
    """
    Parse a sampler spec from the experiment config.

    Finite direction sets may be given as vectors (``"directions"``) or
    as planar angles in radians (``"angles"``).

    :raises ConfigError: On unknown kinds or invalid fields.
    """
    kind = str(payload.get("kind", "")).strip().lower()
    try:
        if kind == UniformPolar.kind:
            return UniformPolar(d=d, L=float(payload["L"]))
        if kind == UniformDirection.kind:
            return UniformDirection(d=d)
        if kind == GaussianPolar.kind:
            return GaussianPolar(
                d=d, schedule=Schedule.from_dict(payload["schedule"])
            )
        if kind == PoissonDirection.kind:
            return PoissonDirection(
                d=d,
                schedule=Schedule.from_dict(payload["schedule"]),
                axis=tuple(float(c) for c in payload.get("axis", ())),
            )
        if kind == FiniteIID.kind:
            if "angles" in payload:
                rows = [(math.cos(a), math.sin(a)) for a in payload["angles"]]
            else:
                rows = payload["directions"]
            radial = payload.get("radial", {}) or {}
            return FiniteIID(
                d=d,
                directions=_normalized(rows),
                radial=RadialLaw(
                    kind=str(radial.get("kind", "uniform")),
                    scale=float(radial.get("scale", 1.0)),
                ),
                weights=tuple(float(w) for w in payload.get("weights", ())),
            )
        if kind == AdversarialCone.kind:
            return AdversarialCone(
                d=d,
                L=float(payload.get("L", 1.0)),
                epsilon=float(payload["epsilon"]),
                base=BaseSequence.from_dict(payload.get("base", {}) or {}),
            )
        if kind == AdversarialSteiner.kind:
            return AdversarialSteiner(
                d=d,
                epsilon=float(payload["epsilon"]),
                base=BaseSequence.from_dict(payload.get("base", {}) or {}),
            )
    except KeyError as exc:
        raise ConfigError(f"sampler '{kind}' is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sampler '{kind}': {exc}") from exc
    raise ConfigError(f"unknown sampler kind '{kind}'")


def spec_to_dict(spec: SamplerSpec) -> dict[str, Any]:
    """Inverse of :func:`spec_from_dict` (dimension excluded)."""
    payload: dict[str, Any] = {"kind": spec.kind}
    if isinstance(spec, UniformPolar):
        payload["L"] = spec.L
    elif isinstance(spec, GaussianPolar):
        payload["schedule"] = spec.schedule.to_dict()
    elif isinstance(spec, PoissonDirection):
        payload["schedule"] = spec.schedule.to_dict()
        if spec.axis:
            payload["axis"] = list(spec.axis)
    elif isinstance(spec, FiniteIID):
        payload["directions"] = [list(u) for u in spec.directions]
        payload["radial"] = {
            "kind": spec.radial.kind,
            "scale": spec.radial.scale,
        }
        if spec.weights:
            payload["weights"] = list(spec.weights)
    elif isinstance(spec, AdversarialCone):
        payload.update(
            L=spec.L, epsilon=spec.epsilon, base=spec.base.to_dict()
        )
    elif isinstance(spec, AdversarialSteiner):
        payload.update(epsilon=spec.epsilon, base=spec.base.to_dict())
    return payload


__all__ = [
    "Schedule",
    "RadialLaw",
    "BaseSequence",
    "UniformPolar",
    "UniformDirection",
    "GaussianPolar",
    "PoissonDirection",
    "FiniteIID",
    "AdversarialCone",
    "AdversarialSteiner",
    "SamplerSpec",
    "ADVERSARIAL_KINDS",
    "DIRECTION_KINDS",
    "spec_from_dict",
    "spec_to_dict",
]
