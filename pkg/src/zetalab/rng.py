"""Counter-based random streams keyed by (seed, index).

Every Monte Carlo unit of work (one zeta sample, one chunk of CUE draws)
gets its own Philox stream, so results do not depend on how the work is
split across processes.
"""

from __future__ import annotations

import numpy as np

# stream tags keep the zeta and CUE experiments on disjoint counters
STREAM_ZETA = 1
STREAM_CUE = 2

_U64 = (1 << 64) - 1


def keyed_generator(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for work item ``index`` of run ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    key = np.array([index & _U64, seed & _U64], dtype=np.uint64)
    counter = np.array([0, 0, 0, stream & _U64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def uniform_height(seed: int, index: int, T: float) -> float:
    """tau_i uniform on [T, 2T] for sample ``index``."""
    return T * (1.0 + keyed_generator(seed, index, STREAM_ZETA).random())
