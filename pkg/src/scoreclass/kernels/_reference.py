"""Pure-Python (numpy) backend for the optimal-strategy oracles.

Semantically identical to the compiled backend; kept vectorized over whole
popcount layers so the fallback stays usable for the acceptance sweeps.
"""

from __future__ import annotations

import numpy as np

from ._common import block_table, layout

NAME = "reference"


def opt_evaluation_cost(costs, probs, alphas, return_choices=False):
    """Expected cost of the optimal adaptive evaluation strategy.

    With ``return_choices`` also returns the argmin table: ``choices[mask,
    ones]`` is the best next test, -1 where the block is already determined.
    """
    c = np.asarray(costs, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    n = c.shape[0]
    blk = block_table(alphas, n)
    pop, off, layers = layout(n)
    dp = np.zeros(off[-1], dtype=np.float64)
    choices = np.full(((1 << n), n + 1), -1, dtype=np.int8) if return_choices else None

    for k in range(n - 1, -1, -1):
        masks = layers[k]
        ones = np.arange(k + 1)
        undet = blk[ones] != blk[n - (k - ones)]
        if not undet.any():
            continue
        cols = np.arange(k + 2)
        best = np.full((masks.shape[0], k + 1), np.inf)
        for i in range(n):
            bit = 1 << i
            sel = (masks & bit) == 0
            rows = masks[sel]
            child = dp[(off[rows | bit])[:, None] + cols[None, :]]
            cand = c[i] + p[i] * child[:, 1:] + (1.0 - p[i]) * child[:, :-1]
            if choices is None:
                best[sel] = np.minimum(best[sel], cand)
            else:
                prev = best[sel]
                improved = cand < prev
                best[sel] = np.where(improved, cand, prev)
                ch = choices[rows[:, None], ones[None, :]]
                ch[improved] = i
                choices[rows[:, None], ones[None, :]] = ch
        vals = np.where(undet[None, :], best, 0.0)
        dp[off[masks][:, None] + ones[None, :]] = vals

    root = float(dp[off[0]])
    return (root, choices) if return_choices else root


def opt_verification_cost(costs, probs, lo, hi):
    """Expected charged cost of the optimal adaptive strategy verifying
    that the total 1s count lands in ``[lo, hi]``.

    Cost is charged only on realizations whose count does land there; a
    state with no such completions is terminal (further tests are free).
    """
    c = np.asarray(costs, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    n = c.shape[0]
    needed_zeros = n - hi
    pop, off, layers = layout(n)

    # Distribution of 1s among each mask's *untested* set, built top-down
    # by reinserting the lowest unset bit.
    pmf = np.zeros((1 << n, n + 1), dtype=np.float64)
    pmf[(1 << n) - 1, 0] = 1.0
    for k in range(n - 1, -1, -1):
        masks = layers[k]
        for i in range(n):
            sel = (masks & ((1 << (i + 1)) - 1)) == ((1 << i) - 1)
            rows = masks[sel]
            base = pmf[rows | (1 << i)]
            upd = base * (1.0 - p[i])
            upd[:, 1:] += base[:, :-1] * p[i]
            pmf[rows] = upd

    dp = np.zeros(off[-1], dtype=np.float64)
    for k in range(n - 1, -1, -1):
        masks = layers[k]
        u = n - k
        ones = np.arange(k + 1)
        zeros = k - ones
        verified = (ones >= lo) & (zeros >= needed_zeros)
        win_lo = np.clip(lo - ones, 0, None)
        win_hi = np.minimum(hi - ones, u)
        empty = win_hi < win_lo
        active = ~(verified | empty)
        if not active.any():
            continue
        csum = np.zeros((masks.shape[0], n + 2), dtype=np.float64)
        np.cumsum(pmf[masks], axis=1, out=csum[:, 1:])
        mass = csum[:, np.where(empty, 0, win_hi + 1)] - csum[:, np.where(empty, 0, win_lo)]
        cols = np.arange(k + 2)
        best = np.full((masks.shape[0], k + 1), np.inf)
        for i in range(n):
            bit = 1 << i
            sel = (masks & bit) == 0
            rows = masks[sel]
            child = dp[(off[rows | bit])[:, None] + cols[None, :]]
            cand = mass[sel] * c[i] + p[i] * child[:, 1:] + (1.0 - p[i]) * child[:, :-1]
            best[sel] = np.minimum(best[sel], cand)
        vals = np.where(active[None, :], best, 0.0)
        dp[off[masks][:, None] + ones[None, :]] = vals

    return float(dp[off[0]])
