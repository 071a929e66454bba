#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Runs each kernel on representative workloads and prints per-backend
timings plus the speedup. Verifies that both backends produce identical
results before timing.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qpass import _kernels_py

try:
    from qpass import _core
except ImportError:
    _core = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_assign_nearest(repeat: int):
    rng = np.random.default_rng(0)
    points = rng.random((50_000, 3))
    centroids = rng.random((1000, 3))
    label = "assign_nearest       50k points x 1000 centroids"

    def run(impl):
        return impl.assign_nearest(points, centroids)

    return label, run, lambda a, b: (a[0] == b[0]).all() and (a[1] == b[1]).all()


def bench_minibatch_update(repeat: int):
    rng = np.random.default_rng(1)
    batches = rng.random((100, 1024, 3))
    init = rng.random((1000, 3))
    label = "minibatch_update     100 batches of 1024, c=1000"

    def run(impl):
        centers = init.copy()
        counts = np.zeros(1000)
        for batch in batches:
            impl.minibatch_update(batch, centers, counts)
        return centers, counts

    return label, run, lambda a, b: (a[0] == b[0]).all() and (a[1] == b[1]).all()


def bench_absorption_walks(repeat: int):
    rng = np.random.default_rng(2)
    n_t, n = 20, 24
    P = np.zeros((n, n))
    for i in range(n_t):
        targets = rng.choice(n_t, size=3, replace=False)
        w = rng.random(3)
        term_w = 0.15
        total = w.sum() + term_w
        P[i, targets] = w / total
        P[i, n_t + int(rng.integers(0, 4))] += term_w / total
    cum = np.ascontiguousarray(np.cumsum(P, axis=1))
    positive = P > 0
    last_col = np.where(positive.any(axis=1),
                        n - 1 - positive[:, ::-1].argmax(axis=1),
                        -1).astype(np.int64)
    b_term = np.array([1.0, 0.7, -1.0, -0.7])
    label = "absorption_walks     500k walks, 24-state chain"

    def run(impl):
        return impl.absorption_walks(cum, n_t, b_term, last_col, 0,
                                     500_000, 7, 10_000)

    return label, run, lambda a, b: (a[0] == b[0]).all() and (a[1] == b[1]).all()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions (best of N)")
    args = parser.parse_args()

    if _core is None:
        print("compiled kernels unavailable; showing numpy fallback only")

    print(f"{'kernel / workload':<55} {'numpy':>10} {'compiled':>10} "
          f"{'speedup':>8}")
    for bench in (bench_assign_nearest, bench_minibatch_update,
                  bench_absorption_walks):
        label, run, equal = bench(args.repeat)
        py_out = run(_kernels_py)
        py_t = _time(lambda: run(_kernels_py), args.repeat)
        if _core is not None:
            c_out = run(_core)
            assert equal(py_out, c_out), f"backend mismatch in {label}"
            c_t = _time(lambda: run(_core), args.repeat)
            print(f"{label:<55} {py_t * 1e3:>8.1f}ms {c_t * 1e3:>8.1f}ms "
                  f"{py_t / c_t:>7.1f}x")
        else:
            print(f"{label:<55} {py_t * 1e3:>8.1f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
