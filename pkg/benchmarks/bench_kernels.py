"""Benchmark the hot kernels: numba-jitted vs pure-numpy implementations.

Usage: python benchmarks/bench_kernels.py [--L 250] [--T 1000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from horizonbattery._kernels import (
    HAS_NUMBA,
    mode_overlap_series_numba,
    mode_overlap_series_numpy,
    quadratic_form_series_numba,
    quadratic_form_series_numpy,
)


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--L", type=int, default=250)
    parser.add_argument("--T", type=int, default=1000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    A = rng.standard_normal((args.L, args.L))
    M = (A + A.T) / 2
    eigs = np.sort(rng.standard_normal(args.L)) * 5.0
    w = rng.standard_normal(args.L) * 0.1
    times = np.arange(args.T) * 0.01

    print(f"L={args.L}, T={args.T} samples, best of {args.repeats}")
    rows = []
    t_np = timeit(quadratic_form_series_numpy, M, eigs, times, repeats=args.repeats)
    rows.append(("quadratic_form_series", "numpy", t_np))
    if HAS_NUMBA:
        quadratic_form_series_numba(M, eigs, times[:2])  # compile
        t_nb = timeit(quadratic_form_series_numba, M, eigs, times, repeats=args.repeats)
        rows.append(("quadratic_form_series", "numba", t_nb))
        rows.append(("quadratic_form_series", "speedup", t_np / t_nb))

    t_np = timeit(mode_overlap_series_numpy, w, eigs, times, repeats=args.repeats)
    rows.append(("mode_overlap_series", "numpy", t_np))
    if HAS_NUMBA:
        mode_overlap_series_numba(w, eigs, times[:2])
        t_nb = timeit(mode_overlap_series_numba, w, eigs, times, repeats=args.repeats)
        rows.append(("mode_overlap_series", "numba", t_nb))
        rows.append(("mode_overlap_series", "speedup", t_np / t_nb))

    if not HAS_NUMBA:
        print("numba unavailable or disabled; only the numpy path was timed")
    for kernel, label, value in rows:
        if label == "speedup":
            print(f"  {kernel:24s} {label:8s} {value:6.2f}x")
        else:
            print(f"  {kernel:24s} {label:8s} {value * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
