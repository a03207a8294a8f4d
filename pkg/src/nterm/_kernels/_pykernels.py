"""Numpy fallback for the compiled subset-scan kernels.

The addition order in subset_sums (bit b added after all lower bits) matches
the compiled backend, so both produce bitwise identical output.
"""
import numpy as np


def subset_sums(vals):
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    n = len(vals)
    if n > 26:
        raise ValueError("subset_sums limited to 26 elements")
    out = np.zeros(1 << n)
    for b in range(n):
        step = 1 << b
        idx = np.arange(1 << n)
        has = (idx >> b) & 1 == 1
        out[has] = out[idx[has] - step] + vals[b]
    return out


def extrema_by_popcount(sums, n):
    sums = np.asarray(sums, dtype=np.float64)
    if sums.shape[0] != (1 << n):
        raise ValueError("sums length must be 2**n")
    pc = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.intp)
    mins = np.full(n + 1, np.inf)
    maxs = np.full(n + 1, -np.inf)
    np.minimum.at(mins, pc, sums)
    np.maximum.at(maxs, pc, sums)
    return mins, maxs
