#!/usr/bin/env python3
"""Benchmark the compiled solver kernels against the NumPy reference.

Two workloads, matching how the engines actually call the kernels:

* omega1: boundary-value subordination solves for semicircle (+) Bernoulli
  over a dense real grid (includes slow near-edge points);
* rect: transform inversion for a stable-plus-atoms law over a density
  grid with a two-level epsilon ladder.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from freeconv import kernels
from freeconv.kernels import reference


def time_call(fn, *args, repeat=5, **kwargs):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def omega1_workload(n=2001):
    z = np.linspace(-2.5, 2.5, n).astype(complex)
    w0 = z + 1j
    return (z, w0, np.array([0.0]), np.array([1.0]), 0.0, 0.0,
            np.array([-1.0, 1.0]), np.array([0.5, 0.5]))


def rect_workload(n=600):
    zt = []
    for x in np.linspace(0.05, 3.0, n // 2):
        for eps in (1e-3, 1e-5):
            u = x - 1j * eps
            zt.append(1.0 / u**2)
    return (np.array(zt), np.array([1.0, -1.0]), np.array([0.05, 0.05]),
            np.array([0.5]), np.array([-0.7]), 0.5)


def omega1_small_batches(fn, n_calls=400, batch=8):
    """Ladder/bisection usage pattern: many small warm-started solves."""
    rng = np.random.default_rng(1)
    base = omega1_workload(batch)
    zs = rng.uniform(-2.2, 2.2, (n_calls, batch)) + 1j * 1e-6
    t0 = time.perf_counter()
    total = 0
    for k in range(n_calls):
        out = fn(zs[k], zs[k] + 1j, *base[2:])
        total += int(out[1].sum())
    return time.perf_counter() - t0, total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"selected backend: {kernels.backend_name()}")
    rows = []

    w = omega1_workload()
    t_ref, out_ref = time_call(reference.omega1_solve, *w, repeat=args.repeat)
    rows.append(("omega1 (python)", t_ref, out_ref[1].sum()))
    if kernels.backend_name() == "compiled":
        t_fast, out_fast = time_call(kernels.omega1_solve, *w, repeat=args.repeat)
        rows.append(("omega1 (compiled)", t_fast, out_fast[1].sum()))
        d = np.max(np.abs(out_ref[0] - out_fast[0]))
        rows.append(("omega1 speedup", t_ref / t_fast, f"max |dw| = {d:.1e}"))

    t_ref, its = omega1_small_batches(reference.omega1_solve)
    rows.append(("omega1 batches (python)", t_ref, its))
    if kernels.backend_name() == "compiled":
        t_fast, its = omega1_small_batches(kernels.omega1_solve)
        rows.append(("omega1 batches (compiled)", t_fast, its))
        rows.append(("omega1 batches speedup", t_ref / t_fast, ""))

    w = rect_workload()
    t_ref, out_ref = time_call(reference.rect_h_solve, *w, repeat=args.repeat)
    rows.append(("rect H (python)", t_ref, int(out_ref[3].sum())))
    if kernels.backend_name() == "compiled":
        t_fast, out_fast = time_call(kernels.rect_h_solve, *w, repeat=args.repeat)
        rows.append(("rect H (compiled)", t_fast, int(out_fast[3].sum())))
        both = out_ref[3] & out_fast[3]
        d = np.max(np.abs(out_ref[0][both] - out_fast[0][both]))
        rows.append(("rect H speedup", t_ref / t_fast, f"max |dH| = {d:.1e}"))

    print(f"{'workload':28s} {'time_or_ratio':>14s}   note")
    for name, val, note in rows:
        if "speedup" in name:
            print(f"{name:28s} {val:14.2f}x  {note}")
        else:
            print(f"{name:28s} {val * 1e3:12.2f}ms  {note}")


if __name__ == "__main__":
    main()
