"""Time the numba kernels against their pure-numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The package picks numba unless HARDYZ_NO_NUMBA=1; this script loads both
implementations directly so one run covers both.
"""
import argparse
import math
import time

import numpy as np

from hardyz import _kernels_numba as nb
from hardyz import _kernels_numpy as npk


def _best(fn, repeat):
    fn()  # warm-up (and JIT compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    ts = np.exp(rng.uniform(math.log(1e3), math.log(1e6), 20_000))
    n = np.arange(1, int(math.sqrt(ts.max() / (2 * math.pi))) + 3, dtype=np.float64)
    logn, rsq = np.log(n), 1.0 / np.sqrt(n)
    ones = np.ones(2_000_001, dtype=np.int64)
    ones[0] = 0
    d3 = nb.convolve_one(nb.convolve_one(ones.copy())).astype(np.float64)
    yield "rs_eval order 5, 2e4 heights up to 1e6", lambda k: k.rs_eval(ts, 5, logn, rsq)
    yield "theta_eval, 2e4 heights", lambda k: k.theta_eval(ts, 2)
    yield "convolve_one, N = 2e6", lambda k: k.convolve_one(ones.copy())
    yield "power_phase_sum, 1e6 terms", lambda k: k.power_phase_sum(d3, 1_000_000, 2_000_000, 0.0, 3 * math.pi, 0.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':45s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s}")
    for name, call in cases():
        t_nb = _best(lambda: call(nb), args.repeat)
        t_np = _best(lambda: call(npk), args.repeat)
        print(f"{name:45s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
