"""The numba kernels and their numpy twins must agree."""
import math

import numpy as np
import pytest

from hardyz import _kernels_numpy as npk, kernels, parallel

nbk = pytest.importorskip("hardyz._kernels_numba")


def _tables(tmax):
    n = np.arange(1, int(math.sqrt(tmax / (2 * math.pi))) + 3, dtype=np.float64)
    return np.log(n), 1.0 / np.sqrt(n)


@pytest.mark.parametrize("order", range(6))
def test_rs_twins(order):
    rng = np.random.default_rng(3)
    ts = np.exp(rng.uniform(math.log(10), math.log(1e6), 500))
    logn, rsq = _tables(ts.max())
    a = nbk.rs_eval(ts, order, logn, rsq)
    b = npk.rs_eval(ts, order, logn, rsq)
    # the twins differ only by phase rounding, which the error model allows for
    logt = np.log(ts)
    assert np.all(np.abs(a - b) <= 8 * np.finfo(float).eps * ts * logt * np.sqrt(1 + logt))


def test_theta_twins():
    ts = np.geomspace(2.0, 1e7, 200)
    for order in range(3):
        assert np.allclose(nbk.theta_eval(ts, order), npk.theta_eval(ts, order), rtol=1e-14, atol=1e-9)


def test_convolve_twins():
    d = np.ones(2000, dtype=np.int64)
    d[0] = 0
    assert np.array_equal(nbk.convolve_one(d.copy()), npk.convolve_one(d.copy()))


def test_power_phase_twins():
    d = np.arange(0, 5001, dtype=np.float64)
    a = complex(*nbk.power_phase_sum(d, 100, 5000, -0.5, 0.7, 0.1))
    b = complex(*npk.power_phase_sum(d, 100, 5000, -0.5, 0.7, 0.1))
    assert abs(a - b) < 1e-9 * abs(a)


def test_rs_threads_identical():
    ts = np.linspace(1e3, 1e5, 20000)
    assert np.array_equal(kernels.rs_eval(ts, 3, 1), kernels.rs_eval(ts, 3, 4))


def test_chunking_and_exact_sum():
    sl = parallel.chunk_slices(10000, 4096)
    assert [s.stop - s.start for s in sl] == [4096, 4096, 1808]
    assert parallel.exact_sum([1e16, 1.0, -1e16]) == 1.0
    assert parallel.map_ordered(lambda x: x * x, range(7), 3) == [0, 1, 4, 9, 16, 25, 36]


def test_env_flag_selects_numpy():
    import os
    import subprocess
    import sys

    env = dict(os.environ, HARDYZ_NO_NUMBA="1")
    code = "from hardyz import kernels, z_rs; print(kernels.BACKEND, z_rs(1000.0).value)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    backend, value = out.split()
    assert backend == "numpy"
    assert abs(float(value) - 0.997794637521586613986) < 2e-3
