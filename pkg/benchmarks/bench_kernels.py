#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot kernels plus a full per-column representation pass at
several sample sizes and prints a speedup table. Run after building the
extension (pip install -e . --no-build-isolation):

    python benchmarks/bench_kernels.py [--sizes 250,1000,4000] [--repeat 7]
"""

import argparse
import timeit

import numpy as np

from gpilab import _kernels_py

try:
    from gpilab import _gpi_kernels
except ImportError:
    _gpi_kernels = None


def _bench(fn, number, repeat):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _cases(n, rng):
    values = rng.uniform(0.01, 1.0, n)
    sorted_vals = np.sort(values)
    z = 0.5
    q = int(np.searchsorted(sorted_vals, z, side="right"))
    ranks = _kernels_py.stable_ranks(values)
    true_u = values.copy()
    nu = np.where(values <= z, 1.0 - values, 0.0)
    sen_args = (sorted_vals, z, q, 0, 1, 1, 1,
                _kernels_py.W_POWER, 1.0, _kernels_py.D_POWER, 1.0,
                _kernels_py.A_COUNT)
    return {
        "gpi_value (sen)": lambda mod: mod.coded_gpi_value(*sen_args),
        "stable_ranks": lambda mod: mod.stable_ranks(values),
        "rank_gap_sum": lambda mod: mod.rank_gap_weighted_sum(ranks, true_u, nu),
        "column pass": lambda mod: (
            mod.coded_gpi_value(*sen_args),
            mod.rank_gap_weighted_sum(mod.stable_ranks(values), true_u, nu),
        ),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="250,1000,4000,20000")
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _gpi_kernels is None:
        print("compiled extension not available; showing numpy backend only")
    rng = np.random.default_rng(0)
    header = f"{'kernel':<18} {'n':>7} {'numpy us':>12} {'cython us':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        number = max(1, 200_000 // n)
        for name, call in _cases(n, rng).items():
            t_py = _bench(lambda: call(_kernels_py), number, args.repeat)
            if _gpi_kernels is not None:
                t_cy = _bench(lambda: call(_gpi_kernels), number, args.repeat)
                print(f"{name:<18} {n:>7} {t_py * 1e6:>12.2f} {t_cy * 1e6:>12.2f} "
                      f"{t_py / t_cy:>8.2f}x")
            else:
                print(f"{name:<18} {n:>7} {t_py * 1e6:>12.2f} {'-':>12} {'-':>9}")
    if _gpi_kernels is not None:
        a = np.sort(rng.uniform(0.01, 1.0, 1000))
        q = int(np.searchsorted(a, 0.5, side="right"))
        args_t = (a, 0.5, q, 0, 1, 1, 1, _kernels_py.W_POWER, 1.0,
                  _kernels_py.D_POWER, 1.0, _kernels_py.A_COUNT)
        diff = abs(_kernels_py.coded_gpi_value(*args_t)
                   - _gpi_kernels.coded_gpi_value(*args_t))
        print(f"\nbackend agreement on a spot case: |diff| = {diff:.3e}")


if __name__ == "__main__":
    main()
