"""Counter-based random substreams for reproducible, parallel-safe trials.

Every trial gets its own Philox generator keyed by
``(seed, experiment, k, trial, purpose)``, so results never depend on the
order or the worker in which trials run.
"""

from __future__ import annotations

import numpy as np

EXPERIMENT_TAGS = {
    "rip-sweep": 1,
    "omp-sweep": 2,
    "harmonic-sweep": 3,
    "spectrum-demo": 4,
    "reconstruct-demo": 5,
}

TRIAL = 0
MATRIX = 1


def substream(seed: int, experiment: str, k: int = 0, trial: int = 0, purpose: int = TRIAL) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    key = (EXPERIMENT_TAGS[experiment], k, trial, purpose)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))
