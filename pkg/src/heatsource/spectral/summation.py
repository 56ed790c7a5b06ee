"""Compensated (Neumaier) summation kernels.

All reductions run sequentially in ascending index order, so the result is
bitwise reproducible regardless of how callers split work between calls.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def compensated_sum(values):
    s = 0.0
    c = 0.0
    for j in range(values.size):
        t = values[j]
        y = s + t
        if abs(s) >= abs(t):
            c += (s - y) + t
        else:
            c += (t - y) + s
        s = y
    return s + c


@numba.njit(cache=True)
def compensated_cosine_sums(weighted, nodes, freqs):
    """Return ``out[i] = sum_j weighted[j] * cos(freqs[i] * nodes[j])``."""
    out = np.empty(freqs.size)
    for i in range(freqs.size):
        f = freqs[i]
        s = 0.0
        c = 0.0
        for j in range(nodes.size):
            t = weighted[j] * np.cos(f * nodes[j])
            y = s + t
            if abs(s) >= abs(t):
                c += (s - y) + t
            else:
                c += (t - y) + s
            s = y
        out[i] = s + c
    return out


def kahan_sum(values):
    """Fixed-order compensated sum of a 1-D array."""
    return float(compensated_sum(np.ascontiguousarray(values, dtype=np.float64)))


def cosine_sums(weighted, nodes, freqs):
    weighted = np.ascontiguousarray(weighted, dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    freqs = np.ascontiguousarray(np.atleast_1d(freqs), dtype=np.float64)
    return compensated_cosine_sums(weighted, nodes, freqs)
