"""Backend selection for the hot kernels.

Numba is used unless ``HARDYZ_NO_NUMBA`` is set to a true value (or numba
cannot be imported), in which case the pure-numpy twins run instead.
"""
import math
import os
import threading

import numpy as np

from . import parallel

_off = os.environ.get("HARDYZ_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
if _off:
    from . import _kernels_numpy as impl
else:
    try:
        from . import _kernels_numba as impl
    except ImportError:  # pragma: no cover - numba missing
        from . import _kernels_numpy as impl

BACKEND = "numba" if impl.__name__.endswith("numba") else "numpy"

_lock = threading.Lock()
_logn = np.zeros(0)
_rsq = np.zeros(0)


def _tables(nmax):
    global _logn, _rsq
    if _logn.shape[0] < nmax:
        with _lock:
            if _logn.shape[0] < nmax:
                size = max(nmax, 2 * _logn.shape[0], 64)
                n = np.arange(1, size + 1, dtype=np.float64)
                _rsq = 1.0 / np.sqrt(n)
                _logn = np.log(n)
    return _logn, _rsq


def rs_eval(ts, order, threads=None):
    """Riemann-Siegel Z at positive heights ``ts`` (array), ``order`` corrections."""
    ts = np.ascontiguousarray(ts, dtype=np.float64)
    if ts.size == 0:
        return np.empty(0)
    logn, rsq = _tables(int(math.sqrt(float(ts.max()) / (2.0 * math.pi))) + 2)
    parts = parallel.map_ordered(
        lambda sl: impl.rs_eval(ts[sl], order, logn, rsq),
        parallel.chunk_slices(ts.size),
        threads,
    )
    return np.concatenate(parts)


def theta_eval(ts, order):
    return impl.theta_eval(np.ascontiguousarray(ts, dtype=np.float64), order)


def dirichlet_sum(t, m):
    re, im = impl.dirichlet_sum(float(t), int(m))
    return complex(re, im)


def afe_sum(t, k, tau, b, dvals):
    return float(impl.afe_sum(float(t), int(k), float(tau), float(b), dvals))


def power_phase_sum(dvals, n0, n1, weight_exp, phase_scale, phase_offset):
    re, im = impl.power_phase_sum(dvals, int(n0), int(n1), float(weight_exp),
                                  float(phase_scale), float(phase_offset))
    return complex(re, im)


def shifted_sum(hre, him, n0, n1, u):
    re, im = impl.shifted_sum(hre, him, int(n0), int(n1), float(u))
    return complex(re, im)


def convolve_one(d):
    return impl.convolve_one(d)


def shift_weight_table(d2, u, n):
    return impl.shift_weight_table(np.ascontiguousarray(d2, dtype=np.float64), float(u), int(n))
