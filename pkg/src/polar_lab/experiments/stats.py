"""
Reduction of trial rows into per-step means and standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from polar_lab.constants import STANDARD_ERRORS
from polar_lab.experiments.models import TrialResult


@dataclass(frozen=True)
class ColumnStats:
    """
    Sample mean and its standard error.

    :ivar mean (float): Sample mean.
    :ivar se (float): Standard error (0 for fewer than two values).
    :ivar count (int): Number of values.
    """

    mean: float
    se: float
    count: int

    def upper(self, k: float = STANDARD_ERRORS) -> float:
        """``mean + k se``."""
        return self.mean + k * self.se

    def lower(self, k: float = STANDARD_ERRORS) -> float:
        """``mean - k se``."""
        return self.mean - k * self.se


Aggregate = dict[int, dict[str, ColumnStats]]


def mean_se(values: Iterable[float]) -> ColumnStats:
    """Mean and standard error of ``values``."""
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        return ColumnStats(math.nan, math.nan, 0)
    se = 0.0
    if data.size > 1:
        se = float(data.std(ddof=1) / math.sqrt(data.size))
    return ColumnStats(float(data.mean()), se, int(data.size))


def aggregate(
    results: Iterable[TrialResult], columns: Iterable[str]
) -> Aggregate:
    """
    Per recorded step, the statistics of every column over the trials
    that were not aborted.
    """
    columns = tuple(columns)
    gathered: dict[int, dict[str, list[float]]] = {}
    for result in results:
        if result.aborted:
            continue
        for row in result.rows:
            bucket = gathered.setdefault(row.step, {c: [] for c in columns})
            for column in columns:
                if column in row.values:
                    bucket[column].append(row.values[column])
    return {
        step: {c: mean_se(v) for c, v in bucket.items() if v}
        for step, bucket in sorted(gathered.items())
    }


def series(agg: Aggregate, column: str) -> tuple[np.ndarray, np.ndarray]:
    """Steps and means of one column, in step order."""
    steps = [s for s, cols in agg.items() if column in cols]
    means = [agg[s][column].mean for s in steps]
    return np.asarray(steps, dtype=int), np.asarray(means, dtype=float)


__all__ = ["ColumnStats", "Aggregate", "mean_se", "aggregate", "series"]
