"""Reproducible random streams.

Philox is a counter-based generator; a stream is keyed by ``(seed, task)``
so that work split into tasks draws the same numbers no matter how the
tasks are scheduled across threads.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def stream(seed, *task):
    """Generator for the sub-stream ``task`` of ``seed`` (a 64-bit integer)."""
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=tuple(int(t) for t in task))
    return np.random.Generator(np.random.Philox(ss))
