#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Run after building the extension:

    python benchmarks/bench_kernels.py [--sizes 256,1024,4096]

Both backends compute identical quantities; the table reports per-call times
and the speedup of the compiled path.
"""

import argparse
import time

import numpy as np

from nqdroof import _kernels_py

try:
    from nqdroof import _kernels
except ImportError:
    _kernels = None


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n_nodes, n_targets, rng):
    nodes = np.exp(2j * np.pi * rng.random(n_nodes)) * (1 + rng.random(n_nodes))
    coeffs = rng.standard_normal(n_nodes) + 1j * rng.standard_normal(n_nodes)
    targets = 3.0 + rng.random(n_targets) * 2 + 1j * (1 + rng.random(n_targets))
    seg_b = targets + 0.1 + 0.05j

    rows = []
    for name, args in (
        ("cauchy_sum", (nodes, coeffs, targets)),
        ("segment_log_sum", (nodes, coeffs, targets, seg_b)),
        ("nearest_node", (nodes, targets)),
    ):
        t_py = timeit(getattr(_kernels_py, name), *args)
        if _kernels is not None:
            t_cy = timeit(getattr(_kernels, name), *args)
            ref = getattr(_kernels_py, name)(*args)
            out = getattr(_kernels, name)(*args)
            ref0 = ref[0] if isinstance(ref, tuple) else ref
            out0 = out[0] if isinstance(out, tuple) else out
            err = float(np.max(np.abs(out0 - ref0)))
            rows.append((name, n_nodes, n_targets, t_py, t_cy, t_py / t_cy, err))
        else:
            rows.append((name, n_nodes, n_targets, t_py, float("nan"),
                         float("nan"), 0.0))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="256,1024,4096",
                    help="comma list of node counts (targets scale with nodes)")
    args = ap.parse_args()

    if _kernels is None:
        print("compiled extension not available; timing the fallback only")
    rng = np.random.default_rng(42)
    print(f"{'kernel':18s} {'nodes':>6s} {'targets':>8s} "
          f"{'numpy[s]':>10s} {'compiled[s]':>12s} {'speedup':>8s} {'max err':>10s}")
    for n in (int(s) for s in args.sizes.split(",")):
        for row in bench(n, 4 * n, rng):
            name, nn, nt, tp, tc, sp, err = row
            print(f"{name:18s} {nn:6d} {nt:8d} {tp:10.5f} {tc:12.5f} "
                  f"{sp:8.2f} {err:10.2e}")


if __name__ == "__main__":
    main()
