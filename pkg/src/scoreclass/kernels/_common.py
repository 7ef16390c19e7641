"""Shared state-space layout for the subset-DP kernels.

States are pairs (tested-subset bitmask, observed 1s count) with
``ones <= popcount(mask)``, stored in one flat array where mask ``m`` owns
the slice ``off[m] : off[m] + popcount(m) + 1``.  Layers are processed by
descending popcount so each state only reads already-final children.
"""

from __future__ import annotations

import numpy as np


def popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pop += (masks >> i) & 1
    return pop


def layout(n: int):
    """Returns (pop, off, layers): per-mask popcount, flat-array offsets and
    the mask lists grouped by popcount."""
    pop = popcounts(n)
    off = np.zeros((1 << n) + 1, dtype=np.int64)
    np.cumsum(pop + 1, out=off[1:])
    layers = [np.nonzero(pop == k)[0] for k in range(n + 1)]
    return pop, off, layers


def block_table(alphas, n: int) -> np.ndarray:
    """Block label for every score 0..n."""
    return np.searchsorted(np.asarray(alphas, dtype=np.int64), np.arange(n + 1), side="right").astype(np.int64)
