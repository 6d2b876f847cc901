"""
Line charts of per-step means, written as SVG.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

CHART_SIZE = (6.4, 4.4)


def _plottable(
    steps: np.ndarray, means: np.ndarray, log_log: bool
) -> tuple[np.ndarray, np.ndarray]:
    keep = np.isfinite(means)
    if log_log:
        keep &= (steps > 0) & (means > 0)
    return steps[keep], means[keep]


def write_chart(
    curves: dict[str, tuple[np.ndarray, np.ndarray]],
    path: str | Path,
    *,
    title: str = "",
    log_log: bool = True,
) -> Path | None:
    """
    Plot every ``name -> (steps, means)`` curve.

    Log-log axes drop non-positive points. Returns ``None`` when nothing
    is left to draw. The SVG carries no date, so equal inputs give equal
    files.
    """
    fig = Figure(figsize=CHART_SIZE)
    ax = fig.add_subplot(1, 1, 1)
    drawn = 0
    for column, (steps, means) in curves.items():
        steps, means = _plottable(
            np.asarray(steps, dtype=float),
            np.asarray(means, dtype=float),
            log_log,
        )
        if len(steps) == 0:
            continue
        ax.plot(steps, means, marker="o", markersize=2.5, label=column)
        drawn += 1
    if drawn == 0:
        return None

    if log_log:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("mean over trials")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


__all__ = ["write_chart"]
