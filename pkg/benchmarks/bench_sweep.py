"""Time the candidate sweep kernels: numba vs pure numpy, plus the FFT path.

    python benchmarks/bench_sweep.py [--sizes 1009 4093 16381] [--repeat 5]

The first numba call compiles (or loads from cache); it is timed separately
and excluded from the steady-state numbers.
"""
import argparse
import time

import numpy as np

from latcbc import kernels
from latcbc.cbc import _power_permutation
from latcbc.korobov import omega_table
from latcbc.numtheory import ModulusContext


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[1009, 4093, 16381])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"numba available: {kernels.sweep_numba is not None}")
    print(f"{'N':>7} {'numpy':>10} {'numba':>10} {'direct':>10} {'fft':>10}  max|diff|")
    for N in args.sizes:
        ctx = ModulusContext(N)
        table = omega_table(N, 2)
        excess = rng.random(N) * 0.1
        cands = ctx.units_array

        ref = kernels.sweep_numpy(excess, table, cands)
        t_np = best_of(lambda: kernels.sweep_numpy(excess, table, cands), args.repeat)

        t_nb = float("nan")
        diff = 0.0
        if kernels.sweep_numba is not None:
            t0 = time.perf_counter()
            got = kernels.sweep_numba(excess, table, cands)
            warm = time.perf_counter() - t0
            diff = float(np.max(np.abs(got - ref)))
            t_nb = best_of(lambda: kernels.sweep_numba(excess, table, cands), args.repeat)
            print(f"        (numba first call {warm:.3f}s)")

        # prime N: the same sweep as a length N-1 circular correlation
        perm = _power_permutation(N)
        x = excess[perm]
        y = table[perm]
        t_dir = best_of(lambda: kernels.correlate_direct(x, y), args.repeat)
        t_fft = best_of(lambda: kernels.correlate_fft(x, y), args.repeat)

        print(f"{N:>7} {t_np:>10.4f} {t_nb:>10.4f} {t_dir:>10.4f} {t_fft:>10.5f}  {diff:.1e}")


if __name__ == "__main__":
    main()
