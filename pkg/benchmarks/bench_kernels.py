"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run twice to see both paths:

    python benchmarks/bench_kernels.py            # numba (if installed)
    FRACLAP_NUMBA=0 python benchmarks/bench_kernels.py

FFT-based convolution is numpy pocketfft in both configurations and is shown
as the reference the direct kernels must beat at small sizes (production code
picks per call via method="auto").
"""

import time

import numpy as np

from fraclap import _kernels
from fraclap._kernels import convolve_lattice, sweep_step


def timeit(fn, *args, repeat=5, warmup=1):
    for _ in range(warmup):
        fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_conv_1d():
    rng = np.random.default_rng(0)
    print("direct 1D convolution vs FFT (seconds, best of 5)")
    print(f"{'size':>8} {'direct':>12} {'fft':>12}")
    for size in (256, 1024, 4096, 16384):
        a = rng.uniform(0, 1, size)
        d = timeit(convolve_lattice, a, a, 0.001, "direct")
        f = timeit(convolve_lattice, a, a, 0.001, "fft")
        print(f"{size:>8} {d:>12.3e} {f:>12.3e}")


def bench_conv_2d():
    rng = np.random.default_rng(1)
    print("\ndirect 2D convolution vs FFT (seconds, best of 5)")
    print(f"{'size':>8} {'direct':>12} {'fft':>12}")
    for size in (16, 32, 64, 128):
        a = rng.uniform(0, 1, (size, size))
        d = timeit(convolve_lattice, a, a, 0.001, "direct")
        f = timeit(convolve_lattice, a, a, 0.001, "fft")
        print(f"{size:>8}^2 {d:>11.3e} {f:>12.3e}")


def bench_sweep_step():
    rng = np.random.default_rng(2)
    print("\nintegral-recurrence step (seconds per 1000 steps, best of 5)")
    print(f"{'modes':>8} {'per-1000':>12}")
    for size in (512, 4096, 65536):
        I = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        decay = np.exp(-rng.uniform(0, 3, size))
        g0 = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        g1 = rng.standard_normal(size) + 1j * rng.standard_normal(size)

        def run_many():
            acc = I
            for _ in range(1000):
                acc = sweep_step(acc, decay, g0, g1, 0.01)
            return acc

        print(f"{size:>8} {timeit(run_many):>12.3e}")


if __name__ == "__main__":
    print(f"backend: {_kernels.backend_name()}  "
          "(set FRACLAP_NUMBA=0 for the numpy fallback, "
          "FRACLAP_THREADS to cap threads)\n")
    bench_conv_1d()
    bench_conv_2d()
    bench_sweep_step()
