#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Times the hot scalar functions and a miniature coverage run on both
backends and prints the speedups.  Run from the repository root::

    python3 benchmarks/bench_kernels.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from epci import backend
from epci.simulation import CoverageConfig, run_mean_coverage


def _time(fn, reps: int) -> float:
    start = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - start) / reps


def bench_backend(label: str, quick: bool) -> dict[str, float]:
    scale = 10 if quick else 1
    with backend.override(label) as kern:
        rows = {}
        rows["noncentral_t_cdf"] = _time(
            lambda: kern.noncentral_t_cdf(1.0, 31.0, 1.0), 20_000 // scale
        )
        rows["betainc"] = _time(lambda: kern.betainc(0.3, 15.5, 49.0), 50_000 // scale)
        rows["norm_quantile"] = _time(lambda: kern.norm_quantile(0.123), 20_000 // scale)
        rows["central_t_quantile"] = _time(
            lambda: kern.central_t_quantile(0.975, 31.0), 5_000 // scale
        )
        rows["solve_noncentrality"] = _time(
            lambda: kern.solve_noncentrality(-2.2727, 99.0, 0.025), 2_000 // scale
        )
        u = np.linspace(0.001, 0.999, 10_000 // scale)
        rows["norm_quantile_array[10k]"] = _time(lambda: kern.norm_quantile_array(u), 3)

        config = CoverageConfig(
            scenario="sample_mean",
            sample_sizes=(20,),
            cutoffs=(0.0, 0.25),
            replications=200 // scale or 1,
            master_seed=7,
        )
        rows["coverage[200 reps x 2 cells]"] = _time(lambda: run_mean_coverage(config), 1)
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="10x fewer repetitions")
    args = parser.parse_args()

    labels = backend.available()
    if "c" not in labels:
        print("compiled kernel not available; benchmarking pure Python only")
    results = {label: bench_backend(label, args.quick) for label in labels}

    names = list(next(iter(results.values())))
    width = max(len(n) for n in names)
    header = f"{'function':<{width}}  " + "  ".join(f"{label:>12}" for label in labels)
    if len(labels) == 2:
        header += f"  {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name in names:
        line = f"{name:<{width}}  "
        line += "  ".join(f"{results[label][name] * 1e6:>10.2f}us" for label in labels)
        if len(labels) == 2:
            line += f"  {results['python'][name] / results['c'][name]:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
