"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py [--rays N] [--repeat K]

Covers the three hot paths (batched ray casts, swept-segment clearance,
point clearance) plus an end-to-end headless run of each reference scenario
on the backend selected by COLSCAN_DISABLE_NJIT.
"""

from __future__ import annotations

import argparse
import math
import time
from pathlib import Path

import numpy as np

from colscan import kernels

SCENARIOS = Path(__file__).parent.parent / "scenarios"

SEGS = np.array(
    [
        [0.0, 0.0, 10.0, 0.0],
        [10.0, 0.0, 10.0, 10.0],
        [10.0, 10.0, 0.0, 10.0],
        [0.0, 10.0, 0.0, 0.0],
        [3.0, 2.0, 3.0, 8.0],
        [6.0, 1.0, 9.0, 4.0],
    ]
)
DISCS = np.array([[5.0, 5.0, 0.3], [7.5, 7.5, 0.6], [2.0, 8.0, 0.4]])


def timeit(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_ray_hits(n_rays, repeat):
    rng = np.random.default_rng(1)
    origins = rng.uniform(0.5, 9.5, size=(n_rays, 2))
    angles = rng.uniform(0, 2 * math.pi, size=n_rays)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)

    rows = []
    if kernels.ray_hits_numba is not None:
        kernels.ray_hits_numba(origins[:2], dirs[:2], 14.0, SEGS, DISCS)  # compile
        t = timeit(lambda: kernels.ray_hits_numba(origins, dirs, 14.0, SEGS, DISCS), repeat)
        rows.append(("ray_hits", "numba", t, n_rays / t))
    t = timeit(lambda: kernels.ray_hits_numpy(origins, dirs, 14.0, SEGS, DISCS), repeat)
    rows.append(("ray_hits", "numpy", t, n_rays / t))
    return rows


def bench_clearance(n, repeat):
    rng = np.random.default_rng(2)
    a = rng.uniform(0.5, 9.5, size=(n, 2))
    b = a + rng.uniform(-0.05, 0.05, size=(n, 2))

    rows = []
    if kernels.segment_clearance_numba is not None:
        kernels.segment_clearance_numba(1.0, 1.0, 1.1, 1.1, SEGS, DISCS)

        def run_nb():
            for i in range(n):
                kernels.segment_clearance_numba(a[i, 0], a[i, 1], b[i, 0], b[i, 1], SEGS, DISCS)

        t = timeit(run_nb, repeat)
        rows.append(("segment_clearance", "numba", t, n / t))

    def run_np():
        for i in range(n):
            kernels.segment_clearance_numpy(a[i, 0], a[i, 1], b[i, 0], b[i, 1], SEGS, DISCS)

    t = timeit(run_np, repeat)
    rows.append(("segment_clearance", "numpy", t, n / t))
    return rows


def bench_headless(repeat):
    from colscan.runner import run_headless

    kernels.warmup()
    rows = []
    for name in ("center", "corner", "wall"):
        t = timeit(lambda: run_headless(SCENARIOS / f"{name}.json"), repeat)
        rows.append((f"run:{name}", kernels.BACKEND, t, None))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rays", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    rows = []
    rows += bench_ray_hits(args.rays, args.repeat)
    rows += bench_clearance(20_000, args.repeat)
    rows += bench_headless(args.repeat)

    print(f"{'kernel':<22}{'backend':<8}{'best time':>12}{'throughput':>16}")
    for name, backend, t, rate in rows:
        through = f"{rate:,.0f}/s" if rate else "-"
        print(f"{name:<22}{backend:<8}{t * 1e3:>10.2f}ms{through:>16}")

    by_kernel = {}
    for name, backend, t, _ in rows:
        by_kernel.setdefault(name, {})[backend] = t
    for name, backends in by_kernel.items():
        if "numba" in backends and "numpy" in backends:
            print(f"{name}: numba is {backends['numpy'] / backends['numba']:.1f}x faster")


if __name__ == "__main__":
    main()
