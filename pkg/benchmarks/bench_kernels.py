"""Benchmark of the subset-scan kernels: compiled extension vs numpy fallback.

The subset-sum table over all 2^n masks and its per-cardinality extrema are
the inner loop of the exhaustive N-term oracle; this compares both backends
on the same inputs and checks they agree bitwise.

Usage: python benchmarks/bench_kernels.py [n_max]
"""
import sys
import time

import numpy as np

from nterm._kernels import _pykernels

try:
    from nterm._kernels import _ckernels
except ImportError:
    _ckernels = None


def bench(mod, vals, n, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        sums = mod.subset_sums(vals)
        mins, maxs = mod.extrema_by_popcount(sums, n)
        best = min(best, time.perf_counter() - t0)
    return best, sums, mins, maxs


def main():
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 22
    rng = np.random.default_rng(0)
    print(f"{'n':>4} {'masks':>10} {'python':>12} {'cython':>12} {'speedup':>8}")
    for n in range(8, n_max + 1, 2):
        vals = np.ascontiguousarray(rng.uniform(0.1, 2.0, n))
        repeat = 5 if n <= 18 else 2
        t_py, s_py, mn_py, mx_py = bench(_pykernels, vals, n, repeat)
        if _ckernels is None:
            print(f"{n:>4} {2**n:>10} {t_py*1e3:>10.2f}ms {'-':>12} {'-':>8}")
            continue
        t_cy, s_cy, mn_cy, mx_cy = bench(_ckernels, vals, n, repeat)
        assert np.array_equal(s_py, s_cy), "backends disagree"
        assert np.array_equal(mn_py, mn_cy) and np.array_equal(mx_py, mx_cy)
        print(
            f"{n:>4} {2**n:>10} {t_py*1e3:>10.2f}ms {t_cy*1e3:>10.2f}ms "
            f"{t_py/t_cy:>7.1f}x"
        )


if __name__ == "__main__":
    main()
