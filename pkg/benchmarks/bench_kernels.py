"""Time the compiled kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

The numba versions are warmed up once before timing so JIT compilation is
not counted.  Output is one line per kernel with the best-of-N wall time.
"""

import argparse
import time

import numpy as np

from ctvrpca import _kernels as K


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    h, w, s = 20, 20, 200
    buf = np.random.default_rng(0).standard_normal(h * w * s)
    rows = np.array([1, 7, 13, 18, 4], dtype=np.int64)
    cols = np.array([2, 11, 5, 17, 19], dtype=np.int64)

    def state():
        return np.array([1, 2, 3, 4], dtype=np.uint64)

    yield "circ_diff (20x20x200, mode 1)", lambda f: f(buf, h, w, s, 0, False), "circ_diff"
    yield "circ_diff adjoint (mode 3)", lambda f: f(buf, h, w, s, 2, True), "circ_diff"
    yield "soft_threshold (80k)", lambda f: f(buf, 0.3), "soft_threshold"
    yield "fill_uniform (100k)", lambda f: f(state(), 100_000), "fill_uniform"
    yield "fill_normal (100k)", lambda f: f(state(), 100_000), "fill_normal"
    yield "partial_shuffle (80k, 4k)", lambda f: f(state(), 80_000, 4_000), "partial_shuffle"
    yield "voronoi_labels (20x20, 5 seeds)", lambda f: f(h, w, rows, cols), "voronoi_labels"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare")
        return
    print(f"{'kernel':34s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for label, call, name in cases():
        fast = getattr(K, f"{name}_numba")
        slow = getattr(K, f"{name}_numpy")
        call(fast)  # compile
        t_fast = best_of(lambda: call(fast), args.repeat)
        t_slow = best_of(lambda: call(slow), args.repeat)
        print(f"{label:34s} {t_fast * 1e3:9.2f}ms {t_slow * 1e3:9.2f}ms {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
