#!/usr/bin/env python3
"""Benchmark the compiled hot kernels against their pure-numpy fallbacks.

Covers both kernels selected at import time: the elastic-net coordinate
descent sweep and the SVR SMO solver. Problem sizes mirror the repeated
holdout harness (about 170 x 14 at lag depth 1 up to 170 x 84 at depth 6).

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from lemps.linear import alpha_grid, backend
from lemps.linear.model import standardize_columns
from lemps.svr import _rbf_matrix, compiled_smo, python_smo


def synth_problem(seed, n, p, noise=0.05):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    w = rng.normal(size=p) * (rng.random(p) < 0.5)
    y = X @ w + noise * rng.normal(size=n)
    return X, y


def time_call(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cd(repeats):
    print("elastic-net coordinate descent (full 100-alpha path, warm starts)")
    print(f"{'size':>12} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for n, p in ((170, 14), (170, 42), (170, 84)):
        X, y = synth_problem(0, n, p)
        X_std, _, _ = standardize_columns(X)
        yc = y - y.mean()
        col_sq = np.einsum("ij,ij->j", X_std, X_std)
        alphas = alpha_grid(X, y, 0.5, count=100, eps=1e-3)

        def run_path(kernel):
            w = np.zeros(p)
            for alpha in alphas:
                r = yc - X_std @ w
                kernel(w, X_std, r, col_sq, n * alpha * 0.5,
                       n * alpha * 0.5, 10_000, 1e-6)

        t_py = time_call(lambda: run_path(backend.python_kernel), repeats)
        if backend.compiled_kernel is None:
            print(f"{n}x{p:<8} {t_py * 1e3:>10.2f}ms {'n/a':>12}")
            continue
        t_c = time_call(lambda: run_path(backend.compiled_kernel), repeats)
        print(f"{f'{n}x{p}':>12} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms {t_py / t_c:>8.1f}x")


def bench_smo(repeats):
    print("\nSVR SMO dual solver (C=100, gamma=0.01, eps=0.01, tol=1e-3)")
    print(f"{'size':>12} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for n, p in ((136, 14), (136, 84)):
        X, y = synth_problem(1, n, p)
        Z, _, _ = standardize_columns(X)
        K = np.ascontiguousarray(_rbf_matrix(np.ascontiguousarray(Z),
                                             np.ascontiguousarray(Z), 0.01))
        yc = np.ascontiguousarray(y)

        t_py = time_call(lambda: python_smo(K, yc, 100.0, 0.01, 1e-3, 10_000),
                         repeats)
        if compiled_smo is None:
            print(f"{n}x{p:<8} {t_py * 1e3:>10.2f}ms {'n/a':>12}")
            continue
        t_c = time_call(lambda: compiled_smo(K, yc, 100.0, 0.01, 1e-3, 10_000),
                        repeats)
        print(f"{f'{n}x{p}':>12} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms {t_py / t_c:>8.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats per case (best is reported)")
    args = parser.parse_args()
    print(f"compiled backends available: cd={backend.compiled_kernel is not None}, "
          f"smo={compiled_smo is not None}")
    bench_cd(args.repeats)
    bench_smo(args.repeats)


if __name__ == "__main__":
    main()
