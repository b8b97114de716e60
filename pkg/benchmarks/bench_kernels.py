#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each workload in this process (numba, unless DECOMP_NO_NUMBA is set) and
then re-executes itself in a subprocess with DECOMP_NO_NUMBA=1 to time the
fallback, printing a side-by-side table.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def workloads():
    rng = np.random.default_rng(0)
    n = 3000
    xk = np.sort(rng.uniform(0, 1000, 80))
    yk = rng.normal(0, 5, 80)
    xq = np.linspace(0, 1000, n)
    y = 100 + rng.normal(0, 10, n)
    p = rng.normal(0, 5, 400)
    a = rng.normal(0, 5, 380)
    seas0 = rng.normal(0, 2, 7)

    from perfdecomp import _kernels as k

    return {
        "natural_spline_eval (80 knots, 3000 queries)": lambda: k.natural_spline_eval(
            xk, yk, xq
        ),
        "erp_distance (400 x 380)": lambda: k.erp_distance(p, a, 0.0),
        "hwes_filter (n=3000, m=7)": lambda: k.hwes_filter(
            y, 0.3, 0.05, 0.2, 7, 100.0, 0.0, seas0
        ),
        "hwes_sse (n=3000, m=7)": lambda: k.hwes_sse(
            y, 0.3, 0.05, 0.2, 7, 100.0, 0.0, seas0
        ),
        "loess_fit (n=3000, k=301)": lambda: k.loess_fit(y, 301),
    }


def run_bench(repeat):
    from perfdecomp import _kernels as k

    k.warm_up()
    results = {}
    for name, fn in workloads().items():
        fn()  # make sure any remaining compilation happens outside the timing
        times = []
        for _ in range(repeat):
            start = time.perf_counter()
            fn()
            times.append(time.perf_counter() - start)
        results[name] = min(times)
    return results


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=7)
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    results = run_bench(args.repeat)
    if args.emit_json:
        print(json.dumps(results))
        return

    from perfdecomp import _kernels

    backend = "numba" if _kernels.NUMBA_ENABLED else "numpy"
    env = dict(os.environ, DECOMP_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--repeat", str(args.repeat), "--emit-json"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    fallback = json.loads(out.stdout.strip().splitlines()[-1])

    width = max(len(k) for k in results)
    print(f"{'workload':<{width}}  {backend:>10}  {'numpy':>10}  {'speedup':>8}")
    for name, t in results.items():
        ft = fallback[name]
        print(f"{name:<{width}}  {t * 1e3:>8.3f}ms  {ft * 1e3:>8.3f}ms  {ft / t:>7.1f}x")


if __name__ == "__main__":
    main()
