"""Benchmark the compiled pair kernels against the NumPy fallback.

Times the four hot primitives and one full basis-pursuit solve under
each backend.  Run from the repository root:

    python3 benchmarks/bench_backends.py [--grid 128] [--delta 0.1]
"""

import argparse
import importlib
import os
import subprocess
import sys
import time

import numpy as np


def _time(fn, *args, repeats=200):
    fn(*args)  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def bench_kernels(grid, backend):
    rng = np.random.default_rng(0)
    ext = rng.standard_normal(grid.n_delta)
    q = rng.standard_normal(grid.n_pairs)
    factors = np.abs(rng.standard_normal(grid.n_delta)) + 0.1
    out = {}
    out["gather_diff_scaled"] = _time(
        backend.gather_diff_scaled, ext, grid.pair_i, grid.pair_j, 1.3)
    out["scatter_mirror_diff"] = _time(
        backend.scatter_mirror_diff, q, grid.mirror, grid.pair_i, 0.5,
        grid.n_delta)
    out["row_sqsums"] = _time(backend.row_sqsums, q, grid.pair_i,
                              grid.n_delta)
    out["scale_by_row"] = _time(backend.scale_by_row, q, grid.pair_i, factors)
    return out


def bench_solve(n, delta):
    import nlflux

    grid = nlflux.build_grid(1, n, delta)
    kernel = nlflux.build_kernel(grid)
    f = nlflux.ScalarField.on_omega(grid, 1.0)
    config = nlflux.SolverConfig(tol_primal=1e-7, tol_gap=1e-6,
                                 step_ratio=10.0)
    start = time.perf_counter()
    _, rep = nlflux.solve_basis_pursuit(f, kernel, True, config)
    elapsed = time.perf_counter() - start
    return elapsed, rep.iterations, nlflux.BACKEND


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--grid", type=int, default=128)
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument("--inner", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.inner:
        import nlflux
        from nlflux import _kernels

        grid = nlflux.build_grid(1, args.grid, args.delta)
        stats = bench_kernels(grid, _kernels)
        elapsed, iters, backend = bench_solve(args.grid, args.delta)
        print(f"backend: {backend}")
        for name, t in stats.items():
            print(f"  {name:22s} {t * 1e6:9.2f} us")
        print(f"  bp-antisym solve       {elapsed:9.3f} s  "
              f"({iters} iterations)")
        return

    env = dict(os.environ)
    for backend in ("cython", "numpy"):
        env["NLFLUX_BACKEND"] = backend
        subprocess.run([sys.executable, __file__, "--inner",
                        "--grid", str(args.grid), "--delta", str(args.delta)],
                       env=env, check=True)


if __name__ == "__main__":
    main()
