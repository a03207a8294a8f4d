# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels for exhaustive subset scans.

The addition order in subset_sums matches the pure-python backend exactly
(bit b is added after all lower bits), so both backends produce bitwise
identical output.
"""
import numpy as np


def subset_sums(double[::1] vals):
    """Sums of vals over all bitmask subsets; entry m = sum of vals[b] for bits b of m."""
    cdef Py_ssize_t n = vals.shape[0]
    if n > 26:
        raise ValueError("subset_sums limited to 26 elements")
    cdef Py_ssize_t size = 1 << n
    out_arr = np.zeros(size, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t b, step, base, off, m
    cdef double v
    for b in range(n):
        step = 1 << b
        v = vals[b]
        base = 0
        while base < size:
            for off in range(step):
                m = base + step + off
                out[m] = out[m - step] + v
            base += 2 * step
    return out_arr


def extrema_by_popcount(double[::1] sums, Py_ssize_t n):
    """Min and max of sums[m] grouped by popcount(m), for masks over n bits."""
    cdef Py_ssize_t size = 1 << n
    if sums.shape[0] != size:
        raise ValueError("sums length must be 2**n")
    mins_arr = np.full(n + 1, np.inf, dtype=np.float64)
    maxs_arr = np.full(n + 1, -np.inf, dtype=np.float64)
    cdef double[::1] mins = mins_arr
    cdef double[::1] maxs = maxs_arr
    cdef Py_ssize_t m, c
    cdef unsigned long long x
    cdef double s
    for m in range(size):
        x = <unsigned long long> m
        c = 0
        while x:
            x &= x - 1
            c += 1
        s = sums[m]
        if s < mins[c]:
            mins[c] = s
        if s > maxs[c]:
            maxs[c] = s
    return mins_arr, maxs_arr
