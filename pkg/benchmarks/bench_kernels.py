#!/usr/bin/env python3
"""Benchmark the compiled quadrature kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 64 128 256] [--nodes 256]

Times the row-coefficient and point-coefficient parabolic sums on square
grids and reports the speedup, plus one end-to-end maximal-average sweep.
"""

import argparse
import time

import numpy as np

from parabolab import _kernels_py
from parabolab.fields import constant_field
from parabolab.grid import GridFunction2D, make_grid
from parabolab.operators import maximal_sharp

try:
    from parabolab import _kernels_cy
except ImportError:
    _kernels_cy = None


def _time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(n, nq, pointwise):
    rng = np.random.default_rng(0)
    values = np.ascontiguousarray(rng.standard_normal((n, n))
                                  + 1j * rng.standard_normal((n, n)))
    t = rng.uniform(-2.0, 2.0, nq)
    w = rng.standard_normal(nq)
    u = rng.uniform(0.0, 2.0, (n, n) if pointwise else n)
    rows = []
    for name, impl in (("cython", _kernels_cy), ("numpy", _kernels_py)):
        if impl is None:
            rows.append((name, float("nan")))
            continue
        out = np.zeros_like(values)

        def run(impl=impl, out=out):
            out[:] = 0
            if pointwise:
                impl.parabolic_sum_points(values, 0.1, 0.1, t, w, u, out)
            else:
                impl.parabolic_sum_rows(values, 0.1, 0.1, t, w, u, out)

        rows.append((name, _time(run)))
    return rows


def bench_operator(n):
    g = make_grid(8.0, 8.0, n, n)
    rng = np.random.default_rng(1)
    F = GridFunction2D(g, rng.standard_normal((n, n)) + 0j)
    u = constant_field(g, 1.0)

    def run():
        maximal_sharp(F, u, range(-2, 1), nodes=128)

    # selection happened at import; report which backend is live
    from parabolab.kernels import backend_name

    return backend_name(), _time(run, repeats=2)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--nodes", type=int, default=256)
    args = ap.parse_args()

    print(f"{'kernel':28s} {'grid':>6s} {'cython':>10s} {'numpy':>10s} {'speedup':>8s}")
    for n in args.sizes:
        for pointwise in (False, True):
            rows = dict(bench_kernel(n, args.nodes, pointwise))
            cy, py = rows.get("cython", float("nan")), rows["numpy"]
            name = "parabolic_sum_" + ("points" if pointwise else "rows")
            speed = py / cy if cy == cy and cy > 0 else float("nan")
            print(f"{name:28s} {n:4d}^2 {cy:9.4f}s {py:9.4f}s {speed:7.1f}x")
    backend, t = bench_operator(args.sizes[-1])
    print(f"\nmaximal sweep on {args.sizes[-1]}^2 via active backend "
          f"[{backend}]: {t:.3f}s")
    print("set PARABOLAB_PURE_PYTHON=1 to force the fallback end to end")


if __name__ == "__main__":
    main()
