#!/usr/bin/env python3
"""Benchmark: compiled kernel vs numpy fallback on representative workloads.

Times the multitaper grid kernel on the default T=512 grid and a longer
T=4096 grid, plus one end-to-end Monte Carlo batch. Run from the repo root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from evospec import _kernels_py
from evospec.estimator import build_grid, default_tapers
from evospec.stattest import mc_study

try:
    from evospec import _kernels as _compiled
except ImportError:
    _compiled = None


def _time(fn, min_seconds=0.4):
    fn()  # warm up
    n = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < min_seconds:
        fn()
        n += 1
    return (time.perf_counter() - t0) / n


def bench_kernel(T, K):
    rng = np.random.default_rng(0)
    x = rng.standard_normal(T)
    grid = build_grid(T, K)
    ts = default_tapers(grid.N, K)
    centers = np.asarray(grid.block_centers)
    tapers = np.ascontiguousarray(ts.tapers)
    freqs = np.asarray(grid.freqs)

    rows = []
    py = _time(lambda: _kernels_py.multitaper_grid(x, centers, tapers, freqs))
    rows.append(("numpy", py))
    if _compiled is not None:
        cy = _time(lambda: _compiled.multitaper_grid(x, centers, tapers, freqs))
        rows.append(("cython", cy))
    print(f"\nmultitaper_grid  T={T} I={grid.I} N={grid.N} J={grid.J} K={K}")
    base = rows[0][1]
    for name, dt in rows:
        print(f"  {name:7s} {dt * 1e6:9.1f} us/call   x{base / dt:5.2f}")


def bench_mc(backend_label):
    dt = _time(lambda: mc_study("a", M=50, T=512, seed=0), min_seconds=1.0)
    print(f"  {backend_label:7s} {dt * 1e3:9.1f} ms per 50-replicate batch")


def main():
    import evospec.backend as backend

    print(f"active backend: {backend.backend_name}")
    bench_kernel(512, 5)
    bench_kernel(4096, 5)
    print("\nmc_study (model a, M=50, active backend)")
    bench_mc(backend.backend_name)


if __name__ == "__main__":
    main()
