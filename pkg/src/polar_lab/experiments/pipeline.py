"""
System pipeline helpers for trial setup and the step loop.
"""

from __future__ import annotations

from typing import Any, Callable, Iterable

from polar_lab.experiments.models import (
    StepPhase,
    TrialTickContext,
    TrialWorld,
)
from polar_lab.experiments.systems import (
    ApplyOperatorSystem,
    DrawParameterSystem,
    MonotoneAuditSystem,
    ObserveSystem,
)


def build_trial_systems(
    *,
    apply: Callable[[Any, Any], Any],
    observe: Callable[[TrialWorld, int], dict[str, float]],
    audit_columns: tuple[str, ...] = (),
    audit_tol: float = 0.0,
    extra: tuple[object, ...] = (),
) -> tuple[object, ...]:
    """
    Build the ordered systems of one trial.

    ``extra`` systems (end-of-step audits) are merged by phase and order.
    """
    systems: list[Any] = [
        DrawParameterSystem(),
        ApplyOperatorSystem(apply),
        ObserveSystem(observe),
    ]
    if audit_columns:
        systems.append(MonotoneAuditSystem(tuple(audit_columns), audit_tol))
    systems.extend(extra)
    return tuple(sorted(systems, key=lambda s: (s.phase, s.order)))


def run_steps(
    world: TrialWorld,
    systems: Iterable[Any],
    steps: int,
    record_steps: Iterable[int],
) -> TrialWorld:
    """
    Run ``steps`` steps. Step 0 only observes and audits the initial
    state.
    """
    systems = tuple(systems)
    recorded = set(record_steps)
    initial = TrialTickContext(world, 0, record=0 in recorded)
    for system in systems:
        if system.phase >= StepPhase.OBSERVE:
            system.step(initial)

    for i in range(1, steps + 1):
        ctx = TrialTickContext(world, i, record=i in recorded)
        for system in systems:
            system.step(ctx)
    return world


__all__ = ["build_trial_systems", "run_steps"]
