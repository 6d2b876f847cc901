"""
Per-step systems of a trial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from polar_lab.experiments.models import (
    ResultRow,
    StepPhase,
    TrialTickContext,
    TrialWorld,
)
from polar_lab.utils import logger

__all__ = [
    "DrawParameterSystem",
    "ApplyOperatorSystem",
    "ObserveSystem",
    "MonotoneAuditSystem",
    "BoundAuditSystem",
]


@dataclass
class DrawParameterSystem:
    """Draws ``W_i`` from the trial stream, feeding back the state."""

    name: str = "draw_parameter"
    phase: int = StepPhase.DRAW
    order: int = 10

    def step(self, ctx: TrialTickContext):
        """Store the parameter of this step on the context."""
        world = ctx.world
        ctx.param = world.stream.draw(ctx.step, world.feedback_state())


@dataclass
class ApplyOperatorSystem:
    """Applies the symmetrization with the drawn parameter."""

    apply: Callable[[Any, Any], Any]
    name: str = "apply_operator"
    phase: int = StepPhase.APPLY
    order: int = 20

    def step(self, ctx: TrialTickContext):
        """Replace the state by its image."""
        ctx.world.state = self.apply(ctx.world.state, ctx.param)


@dataclass
class ObserveSystem:
    """Records observables at the recorded steps."""

    observe: Callable[[TrialWorld, int], dict[str, float]]
    name: str = "observe"
    phase: int = StepPhase.OBSERVE
    order: int = 30

    def step(self, ctx: TrialTickContext):
        """Append a row when this step is recorded."""
        if not ctx.record:
            return
        world = ctx.world
        values = self.observe(world, ctx.step)
        world.rows.append(ResultRow(world.trial, ctx.step, values))


@dataclass
class MonotoneAuditSystem:
    """
    Checks that recorded columns never increase.

    A value may exceed its predecessor by ``tol * max(1, |previous|)``.
    """

    columns: tuple[str, ...]
    tol: float = 0.0
    name: str = "monotone_audit"
    phase: int = StepPhase.AUDIT
    order: int = 40

    def step(self, ctx: TrialTickContext):
        """Compare the latest row with the previous recorded one."""
        if not ctx.record:
            return
        world = ctx.world
        values = world.rows[-1].values
        for column in self.columns:
            audit = f"monotone:{column}"
            current = values[column]
            previous = world.last.get(column)
            world.last[column] = current
            if previous is None:
                world.pass_audit(audit)
                continue
            if current > previous + self.tol * max(1.0, abs(previous)):
                if world.audits.get(audit, True):
                    logger.warning(
                        f"trial {world.trial}: {column} rose from "
                        f"{previous:.6g} to {current:.6g} at step {ctx.step}"
                    )
                world.fail_audit(audit)
            else:
                world.pass_audit(audit)


@dataclass
class BoundAuditSystem:
    """
    Checks a scalar of the state against a per-step bound at every step,
    recorded or not.
    """

    audit: str
    value: Callable[[Any], float]
    bound: Callable[[int], float]
    lower: bool = True
    tol: float = 0.0
    name: str = "bound_audit"
    phase: int = StepPhase.AUDIT
    order: int = 45

    def step(self, ctx: TrialTickContext):
        """Evaluate the state and compare with the bound."""
        world = ctx.world
        current = float(self.value(world.state))
        target = float(self.bound(ctx.step))
        if self.lower:
            ok = current >= target - self.tol
        else:
            ok = current <= target + self.tol
        if ok:
            world.pass_audit(self.audit)
            return
        if world.audits.get(self.audit, True):
            logger.warning(
                f"trial {world.trial}: {self.audit} violated at step "
                f"{ctx.step}: {current:.12g} vs {target:.12g}"
            )
        world.fail_audit(self.audit)
