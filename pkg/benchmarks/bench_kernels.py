"""Compiled vs numpy kernels on the workloads the experiments actually run.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-repeat time per call for each backend and the speedup.
"""

from __future__ import annotations

import argparse
import math
import timeit
from types import SimpleNamespace

import numpy as np

from zetalab import _backend
from zetalab.cue import CHUNK
from zetalab.zeta import z_on_grid


def _headline_grid(T=1e7, theta=3.0):
    # one headline sample: the widest grid of the T=1e7 experiment
    spacing = 2 * math.pi / math.log(T / (2 * math.pi))
    k_max = int(math.pi * math.log(T) ** theta / spacing)
    return 1.5 * T, spacing, k_max


def _rs_arguments():
    captured = []

    def record(*args):
        captured.append(args)
        return _backend.get("python").rs_main_sum(*args)

    _backend.AVAILABLE["_record"] = SimpleNamespace(rs_main_sum=record)
    try:
        z_on_grid(*_headline_grid(), backend="_record")
    finally:
        del _backend.AVAILABLE["_record"]
    return captured[0]


def rs_sum_case(backend):
    args = _rs_arguments()
    kern = _backend.get(backend)
    return lambda: kern.rs_main_sum(*args)


def zeta_grid_case(backend):
    grid = _headline_grid()
    return lambda: z_on_grid(*grid, backend=backend)


def cue_chunk_case(backend, n=200):
    rng = np.random.default_rng(0)
    u_phase = rng.random((CHUNK, n))
    u_radius = 1.0 - rng.random((CHUNK, n))
    kern = _backend.get(backend)
    return lambda: kern.cue_log_abs_sum(u_phase, u_radius)


def bench(make, repeat):
    timings = {}
    for name in ("python", "compiled"):
        if name not in _backend.AVAILABLE:
            continue
        fn = make(name)
        fn()
        timings[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    return timings


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if "compiled" not in _backend.AVAILABLE:
        print("compiled extensions not built; only the numpy backend is timed")
    cases = [
        ("rs_main_sum, T=1e7, theta=3 grid", rs_sum_case),
        ("z_on_grid (whole evaluation), same grid", zeta_grid_case),
        (f"cue_log_abs_sum, {CHUNK} x 200 draws", cue_chunk_case),
    ]
    print(f"{'kernel':<42} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, make in cases:
        t = bench(make, args.repeat)
        py = t["python"]
        comp = t.get("compiled", math.nan)
        print(f"{label:<42} {py * 1e3:>8.1f}ms {comp * 1e3:>8.1f}ms {py / comp:>7.2f}x")


if __name__ == "__main__":
    main()
