#!/usr/bin/env python3
"""Throughput comparison of the numba-compiled kernels vs the numpy fallback.

Run as ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on
inputs shaped like a 10-robot mission on a 20x20 map, both paths are checked
for identical outputs first, and the numba path is warmed up so compilation
time is excluded.
"""

import timeit

import numpy as np

from patrolsim import kernels
from patrolsim.kernels import (
    _completions_loop,
    _completions_numpy,
    _merge_slice_loop,
    _merge_slice_numpy,
    _top_s_loop,
    _top_s_numpy,
    _utilities_loop,
    _utilities_numpy,
)

REPEAT = 2000
K = 400
N = 10


def make_inputs(rng):
    positions = rng.uniform(0, 600, (N, 2))
    centers = rng.uniform(0, 600, (K, 2))
    assumed = rng.integers(0, 5000, K).astype(np.int64)
    utime = rng.integers(0, 40000, K).astype(np.int64)
    grids = rng.permutation(K)[:128].astype(np.int64)
    ivals = rng.integers(0, 5000, 128).astype(np.int64)
    tvals = rng.integers(0, 40000, 128).astype(np.int64)
    dists = rng.uniform(0, 180, 113)
    cheb = rng.uniform(0, 600, 113)
    util_assumed = rng.integers(0, 5000, 113).astype(np.float64)
    return positions, centers, assumed, utime, grids, ivals, tvals, dists, cheb, util_assumed


def bench(name, fast, slow, args, mutates=False):
    def call(fn):
        if mutates:
            a = args[0].copy()
            u = args[1].copy()
            return fn(a, u, *args[2:])
        return fn(*args)

    # equivalence check (fresh copies when the kernel writes in place)
    out_fast, out_slow = call(fast), call(slow)
    if not mutates:
        if isinstance(out_fast, tuple):
            assert all(np.array_equal(a, b) for a, b in zip(out_fast, out_slow))
        else:
            assert np.allclose(out_fast, out_slow, rtol=0, atol=0)

    call(fast)  # warm-up (numba compilation)
    t_fast = timeit.timeit(lambda: call(fast), number=REPEAT) / REPEAT
    t_slow = timeit.timeit(lambda: call(slow), number=REPEAT) / REPEAT
    print(f"{name:<14} numba {t_fast * 1e6:9.2f} us   numpy {t_slow * 1e6:9.2f} us"
          f"   speedup {t_slow / t_fast:5.2f}x")


def main():
    if not kernels.NUMBA_ENABLED:
        print("warning: numba path unavailable (PATROLSIM_NO_NUMBA set or "
              "numba missing); timing the uncompiled loop variants instead")
    rng = np.random.default_rng(1)
    (positions, centers, assumed, utime, grids, ivals, tvals,
     dists, cheb, util_assumed) = make_inputs(rng)

    fast = {
        "completions": kernels.completions if kernels.NUMBA_ENABLED else _completions_loop,
        "merge_slice": kernels.merge_slice if kernels.NUMBA_ENABLED else _merge_slice_loop,
        "top_s": kernels.top_s if kernels.NUMBA_ENABLED else _top_s_loop,
        "utilities": kernels.utilities if kernels.NUMBA_ENABLED else _utilities_loop,
    }
    bench("completions", fast["completions"], _completions_numpy,
          (positions, centers, 3.0))
    bench("merge_slice", fast["merge_slice"], _merge_slice_numpy,
          (assumed, utime, grids, ivals, tvals), mutates=True)
    bench("top_s", fast["top_s"], _top_s_numpy, (utime, 8))
    bench("utilities", fast["utilities"], _utilities_numpy,
          (util_assumed, dists, cheb, 200.0, 703.0, 304.0, 1.5, True))


if __name__ == "__main__":
    main()
