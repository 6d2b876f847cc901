"""
Per-trial random streams.

Each trial owns a ``Philox`` counter-based generator keyed by
``SeedSequence(seed, spawn_key=(trial,))``: the stream depends on
``(seed, trial)`` only, never on which worker runs the trial.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """
    Generator for one trial.

    :raises ValueError: If ``seed`` is not a 64-bit unsigned integer or
        ``trial`` is negative.
    """
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    if trial < 0:
        raise ValueError(f"trial must be >= 0, got {trial}")
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(sequence))


def setup_stream(seed: int) -> np.random.Generator:
    """
    Generator for data shared by all trials (random initial sets).

    Keyed by the root of the seed sequence, so it never coincides with a
    trial stream.
    """
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    sequence = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(sequence))


__all__ = ["trial_stream", "setup_stream", "MAX_SEED"]
