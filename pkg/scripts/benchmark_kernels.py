#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on a realistic workload in both modes and prints the
timings side by side. Numba timings exclude the first (compilation) call.

    python3 scripts/benchmark_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from tangleflip import build_flip_graph, enumerate_triangulations
from tangleflip import kernels
from tangleflip.polygon import triangulation_masks


def timeit(fn, repeat):
    fn()  # warm-up / jit compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    modes = ["numpy"] + (["numba"] if kernels._HAS_NUMBA else [])
    rows = []

    tris = enumerate_triangulations(12)
    masks = triangulation_masks(12, tris)
    for mode in modes:
        rows.append(
            (
                "count_disjoint_ordered (12-gon, 16796 masks)",
                mode,
                timeit(lambda: kernels.count_disjoint_ordered(masks, mode=mode), args.repeat),
            )
        )

    g8 = build_flip_graph(8)
    indptr, indices = g8.csr()
    for mode in modes:
        rows.append(
            (
                "all_eccentricities (4872 vertices, 48720 edges)",
                mode,
                timeit(
                    lambda: kernels.all_eccentricities(indptr, indices, mode=mode),
                    args.repeat,
                ),
            )
        )

    x = np.random.default_rng(0).standard_normal(g8.vertex_count)
    for mode in modes:
        rows.append(
            (
                "mean_matvec x1000 (4872 vertices)",
                mode,
                timeit(
                    lambda: [
                        kernels.mean_matvec(indptr, indices, x, g8.degree, mode=mode)
                        for _ in range(1000)
                    ],
                    args.repeat,
                ),
            )
        )

    starts = np.arange(g8.vertex_count, dtype=np.int64)[::8].copy()
    for mode in modes:
        rows.append(
            (
                "tv_first_crossing (609 starts, up to 32 steps)",
                mode,
                timeit(
                    lambda: kernels.tv_first_crossing(
                        indptr, indices, g8.degree, starts, 32,
                        threshold=0.25 - 1e-9, mode=mode,
                    ),
                    args.repeat,
                ),
            )
        )

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'mode':<6}  best")
    for name, mode, secs in rows:
        print(f"{name:<{width}}  {mode:<6}  {secs * 1000:9.1f} ms")


if __name__ == "__main__":
    main()
