"""Pure-numpy twins of ``_kernels_numba``.

Same signatures and results to rounding; selected with ``HARDYZ_NO_NUMBA=1``.
Row sums use numpy's pairwise summation instead of TwoSum lanes.
"""
import math

import numpy as np

from ._rs_coeffs import RS_COEFFS

TWO_PI = 2.0 * math.pi
INV_TWO_PI = 1.0 / TWO_PI
_BLOCK = 1 << 20  # elements per temporary 2-D block


def csum(buf, n):
    return math.fsum(buf[:n])


def _theta(t, order):
    th = 0.5 * t * np.log(t * INV_TWO_PI) - 0.5 * t - 0.125 * math.pi
    if order >= 1:
        th = th + 1.0 / (48.0 * t)
    if order >= 2:
        th = th + 7.0 / (5760.0 * t**3)
    return th


def theta_eval(ts, order):
    return _theta(np.asarray(ts, dtype=np.float64), order)


def rs_eval(ts, order, logn, rsq):
    ts = np.asarray(ts, dtype=np.float64)
    out = np.empty(ts.shape[0])
    if ts.size == 0:
        return out
    a = np.sqrt(ts * INV_TWO_PI)
    nt = a.astype(np.int64)
    th = _theta(ts, 2)
    order_idx = np.argsort(ts, kind="stable")
    rows = max(1, _BLOCK // max(1, int(nt.max())))
    for start in range(0, ts.size, rows):
        idx = order_idx[start:start + rows]
        width = int(nt[idx].max())
        ph = th[idx, None] - ts[idx, None] * logn[None, :width]
        terms = rsq[None, :width] * np.cos(ph)
        terms[np.arange(width)[None, :] >= nt[idx, None]] = 0.0
        out[idx] = 2.0 * terms.sum(axis=1)
    if order >= 1:
        zz = a - nt - 0.5
        corr = np.zeros_like(ts)
        scale = np.ones_like(ts)
        for j in range(order):
            corr += scale * np.polynomial.polynomial.polyval(zz, RS_COEFFS[j])
            scale = scale / a
        sign = np.where(nt % 2 == 1, 1.0, -1.0)
        out += sign * corr / np.sqrt(a)
    return out


def dirichlet_sum(t, m):
    n = np.arange(1, m + 1, dtype=np.float64)
    ph = -t * np.log(n)
    w = 1.0 / np.sqrt(n)
    return math.fsum(w * np.cos(ph)), math.fsum(w * np.sin(ph))


def afe_sum(t, k, tau, b, dvals):
    base = t * math.log(tau) - 0.5 * k * t - 0.125 * math.pi * k
    nmax = min(int(b * tau), dvals.shape[0] - 1)
    n = np.arange(1, nmax + 1, dtype=np.float64)
    u = np.log(n / tau) / math.log(b)
    rho = np.where(u <= -1.0, 1.0, np.where(u >= 1.0, 0.0, 0.5 * (1.0 - np.sin(0.5 * math.pi * u))))
    terms = rho * dvals[1:nmax + 1] / np.sqrt(n) * np.cos(base - t * np.log(n))
    return 2.0 * math.fsum(terms)


def power_phase_sum(dvals, n0, n1, weight_exp, phase_scale, phase_offset):
    if n1 < n0:
        return 0.0, 0.0
    n = np.arange(n0, n1 + 1, dtype=np.float64)
    ph = phase_scale * n ** (2.0 / 3.0) + phase_offset
    w = dvals[n0:n1 + 1] * n**weight_exp
    return math.fsum(w * np.cos(ph)), math.fsum(w * np.sin(ph))


def shifted_sum(hre, him, n0, n1, u):
    if n1 < n0:
        return 0.0, 0.0
    n = np.arange(n0, n1 + 1, dtype=np.float64)
    ph = u / 3.0 * np.log(n) - 3.0 * math.pi * n ** (2.0 / 3.0) - 0.125 * math.pi
    c, s = np.cos(ph), np.sin(ph)
    w = n ** (-1.0 / 6.0)
    hr, hi = hre[n0:n1 + 1], him[n0:n1 + 1]
    return math.fsum(w * (hr * c - hi * s)), math.fsum(w * (hr * s + hi * c))


def convolve_one(d):
    n = d.shape[0] - 1
    e = np.zeros_like(d)
    for m in range(1, n + 1):
        if d[m]:
            e[m::m] += d[m]
    return e


def shift_weight_table(d2, u, n):
    delta = np.arange(1, n + 1, dtype=np.float64)
    w = d2[1:n + 1] * np.exp(1j * u * np.log(delta))
    h = np.zeros(n + 1, dtype=np.complex128)
    for m in range(1, n + 1):
        h[m::m] += w[m - 1]
    h[1:] *= np.exp(-1j * u * np.log(delta))
    return h.real.copy(), h.imag.copy()
