# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend for the optimal-strategy oracles.

Same state-space layout as the reference backend (see _common.layout);
the inner loops run without the GIL.
"""

import numpy as np

from ._common import block_table, layout

NAME = "native"

cdef double INF = float("inf")


cdef void _eval_core(int n, double[::1] c, double[::1] p, long[::1] blk,
                     long[::1] order, long[::1] off, long[::1] pop,
                     double[::1] dp, signed char[:, ::1] choices,
                     bint want_choices) noexcept nogil:
    cdef long t, mask, base, child, total = order.shape[0]
    cdef int k, ones, zeros, i, besti
    cdef double best, v
    for t in range(total):
        mask = order[t]
        k = <int> pop[mask]
        base = off[mask]
        for ones in range(k + 1):
            zeros = k - ones
            if blk[ones] == blk[n - zeros]:
                dp[base + ones] = 0.0
                continue
            best = INF
            besti = -1
            for i in range(n):
                if not (mask >> i) & 1:
                    child = mask | (<long> 1 << i)
                    v = c[i] + p[i] * dp[off[child] + ones + 1] \
                        + (1.0 - p[i]) * dp[off[child] + ones]
                    if v < best:
                        best = v
                        besti = i
            dp[base + ones] = best
            if want_choices:
                choices[mask, ones] = <signed char> besti


cdef void _verify_core(int n, double[::1] c, double[::1] p, int lo, int hi,
                       long[::1] order, long[::1] off, long[::1] pop,
                       double[::1] dp, double[::1] buf) noexcept nogil:
    cdef int needed_zeros = n - hi
    cdef long t, mask, base, child, total = order.shape[0]
    cdef int k, u, ulen, ones, zeros, i, s, a, b
    cdef double best, v, mass
    for t in range(total):
        mask = order[t]
        k = <int> pop[mask]
        u = n - k
        base = off[mask]
        # pmf of the 1s count among this mask's untested variables
        buf[0] = 1.0
        ulen = 0
        for i in range(n):
            if not (mask >> i) & 1:
                buf[ulen + 1] = buf[ulen] * p[i]
                for s in range(ulen, 0, -1):
                    buf[s] = buf[s] * (1.0 - p[i]) + buf[s - 1] * p[i]
                buf[0] = buf[0] * (1.0 - p[i])
                ulen += 1
        for ones in range(k + 1):
            zeros = k - ones
            if ones >= lo and zeros >= needed_zeros:
                dp[base + ones] = 0.0
                continue
            a = lo - ones
            b = hi - ones
            if a < 0:
                a = 0
            if b > u:
                b = u
            if a > b:
                dp[base + ones] = 0.0
                continue
            mass = 0.0
            for s in range(a, b + 1):
                mass += buf[s]
            best = INF
            for i in range(n):
                if not (mask >> i) & 1:
                    child = mask | (<long> 1 << i)
                    v = mass * c[i] + p[i] * dp[off[child] + ones + 1] \
                        + (1.0 - p[i]) * dp[off[child] + ones]
                    if v < best:
                        best = v
            dp[base + ones] = best


def _layout_arrays(n):
    pop, off, _ = layout(n)
    order = np.argsort(-pop, kind="stable").astype(np.int64)
    return pop, off, order


def opt_evaluation_cost(costs, probs, alphas, return_choices=False):
    """Expected cost of the optimal adaptive evaluation strategy."""
    c = np.ascontiguousarray(costs, dtype=np.float64)
    p = np.ascontiguousarray(probs, dtype=np.float64)
    n = c.shape[0]
    blk = block_table(alphas, n)
    pop, off, order = _layout_arrays(n)
    dp = np.zeros(off[-1], dtype=np.float64)
    if return_choices:
        choices = np.full(((1 << n), n + 1), -1, dtype=np.int8)
    else:
        choices = np.empty((1, 1), dtype=np.int8)
    _eval_core(n, c, p, blk, order, off, pop, dp, choices, return_choices)
    root = float(dp[off[0]])
    return (root, choices) if return_choices else root


def opt_verification_cost(costs, probs, lo, hi):
    """Expected charged cost of the optimal adaptive strategy verifying
    that the total 1s count lands in ``[lo, hi]``."""
    c = np.ascontiguousarray(costs, dtype=np.float64)
    p = np.ascontiguousarray(probs, dtype=np.float64)
    n = c.shape[0]
    pop, off, order = _layout_arrays(n)
    dp = np.zeros(off[-1], dtype=np.float64)
    buf = np.zeros(n + 1, dtype=np.float64)
    _verify_core(n, c, p, lo, hi, order, off, pop, dp, buf)
    return float(dp[off[0]])
