"""Throughput comparison: compiled walk kernels vs the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--trials N] [--k K]

Both backends consume identical RNG streams, so the outputs are checked for
bit equality while timing.
"""

import argparse
import time

import numpy as np

from ruintime import _walk_kernel_py as py_impl
from ruintime import simulation
from ruintime.core import WalkParams

try:
    from ruintime import _walk_kernel as cy_impl
except ImportError:
    cy_impl = None


def _time_walk(impl, p, k, trials, seed):
    dur = np.empty(trials, np.int64)
    win = np.empty(trials, np.int8)
    start = time.perf_counter()
    impl.walk_chunk(p, k, seed, 0, dur, win, 10**9)
    elapsed = time.perf_counter() - start
    return elapsed, dur, win


def _time_coupled(impl, p_lo, p_hi, k, start_level, trials, seed):
    u_lo = simulation.conditioned_thresholds(WalkParams(p_lo, k))
    u_hi = simulation.conditioned_thresholds(WalkParams(p_hi, k))
    y_lo = np.empty(trials, np.int64)
    y_hi = np.empty(trials, np.int64)
    start = time.perf_counter()
    impl.coupled_chunk(u_lo, u_hi, start_level, seed, 0, y_lo, y_hi, 10**9)
    elapsed = time.perf_counter() - start
    return elapsed, y_lo, y_hi


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--p", type=float, default=0.45)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    rows = []
    t_py, d_py, w_py = _time_walk(py_impl, args.p, args.k, args.trials, args.seed)
    rows.append(("walk", "python", t_py, args.trials / t_py))
    if cy_impl is not None:
        t_cy, d_cy, w_cy = _time_walk(cy_impl, args.p, args.k, args.trials, args.seed)
        assert np.array_equal(d_py, d_cy) and np.array_equal(w_py, w_cy)
        rows.append(("walk", "cython", t_cy, args.trials / t_cy))

    t_py, y_py, z_py = _time_coupled(
        py_impl, 0.2, 0.5, args.k, 1, args.trials, args.seed
    )
    rows.append(("coupled", "python", t_py, args.trials / t_py))
    if cy_impl is not None:
        t_cy, y_cy, z_cy = _time_coupled(
            cy_impl, 0.2, 0.5, args.k, 1, args.trials, args.seed
        )
        assert np.array_equal(y_py, y_cy) and np.array_equal(z_py, z_cy)
        rows.append(("coupled", "cython", t_cy, args.trials / t_cy))

    print(f"{'kernel':<10}{'backend':<10}{'seconds':>10}{'trials/s':>14}")
    for kernel, backend, secs, rate in rows:
        print(f"{kernel:<10}{backend:<10}{secs:>10.3f}{rate:>14,.0f}")
    if cy_impl is None:
        print("compiled backend unavailable; outputs above are fallback only")
    else:
        by = {(k, b): s for k, b, s, _ in rows}
        for kernel in ("walk", "coupled"):
            speedup = by[(kernel, "python")] / by[(kernel, "cython")]
            print(f"{kernel}: compiled speedup x{speedup:,.0f}")


if __name__ == "__main__":
    main()
