#!/usr/bin/env python3
"""Timing comparison between the pure-numpy kernels and the compiled
extension. Run from anywhere:

    python3 benchmarks/bench_kernels.py [--repeat 5]

The same inputs are fed to both implementations and the per-call wall time
is reported together with the speedup. If the extension is unavailable the
script still reports the pure-python numbers.
"""

import argparse
import time

import numpy as np

from degenex import _kernels
from degenex._kernels import pyback

try:
    from degenex._kernels import _fastcore
except ImportError:
    _fastcore = None


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, pure_fn, fast_fn, args_factory, repeat):
    args = args_factory()
    t_pure = timeit(pure_fn, *args, repeat=repeat)
    if fast_fn is None:
        print("%-28s pure %8.3f ms   compiled      n/a" % (name, t_pure * 1e3))
        return
    args = args_factory()  # fresh buffers: leja_accumulate mutates in place
    t_fast = timeit(fast_fn, *args, repeat=repeat)
    print("%-28s pure %8.3f ms   compiled %8.3f ms   x%.1f"
          % (name, t_pure * 1e3, t_fast * 1e3, t_pure / max(t_fast, 1e-12)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print("active backend:", _kernels.BACKEND)

    def herm_batch():
        A = rng.normal(size=(512, 6, 6)) + 1j * rng.normal(size=(512, 6, 6))
        return ((A + A.conj().transpose(0, 2, 1)) / 2,)

    def rect_batch():
        return (rng.normal(size=(2048, 3, 2)) + 1j * rng.normal(size=(2048, 3, 2)),)

    def dist_args():
        z = rng.normal(size=1200) + 1j * rng.normal(size=1200)
        return (z,)

    def cross_args():
        z = rng.normal(size=600) + 1j * rng.normal(size=600)
        w = rng.normal(size=1200) + 1j * rng.normal(size=1200)
        return (z, w)

    def leja_args():
        acc = np.zeros(32768)
        grid = rng.normal(size=32768) + 1j * rng.normal(size=32768)
        return (acc, grid, complex(rng.normal(), rng.normal()))

    fast = _fastcore if _fastcore is not None else None
    bench("batch_jacobi_eigh 512x6x6", pyback.batch_jacobi_eigh,
          getattr(fast, "batch_jacobi_eigh", None), herm_batch, args.repeat)
    bench("batch_sigma_max 2048x3x2", pyback.batch_sigma_max,
          getattr(fast, "batch_sigma_max", None), rect_batch, args.repeat)
    bench("pairwise_log_abs 1200", pyback.pairwise_log_abs,
          getattr(fast, "pairwise_log_abs", None), dist_args, args.repeat)
    bench("sum_log_abs_diff 600x1200", pyback.sum_log_abs_diff,
          getattr(fast, "sum_log_abs_diff", None), cross_args, args.repeat)
    bench("leja_accumulate 32768", pyback.leja_accumulate,
          getattr(fast, "leja_accumulate", None), leja_args, args.repeat)


if __name__ == "__main__":
    main()
