"""
Deterministic per-task seeds derived from one master seed.

Seeds come from numpy's SeedSequence with the task index as spawn key, so a
task's stream does not depend on how many other tasks run or in which order.
"""

import numpy as np


def derive_seed(master: int, *keys: int) -> int:
    """64-bit seed for the task identified by keys under the master seed."""
    sequence = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def task_rng(master: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *keys))
