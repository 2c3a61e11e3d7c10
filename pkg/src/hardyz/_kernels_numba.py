"""Numba kernels for the hot loops.

Every public function here has a twin with the same signature in
``_kernels_numpy``; ``hardyz.kernels`` picks one at import time.

Trigonometric calls dominate the Riemann-Siegel sums and libm ``cos`` does
not vectorize, so phases are reduced against a three-part split of 2*pi and
fed to a branch-free polynomial.  Main sums use 4-lane TwoSum compensation.
"""
import math

import numpy as np
from numba import njit

from ._rs_coeffs import RS_COEFFS

TWO_PI = 2.0 * math.pi
INV_TWO_PI = 1.0 / TWO_PI
# 2*pi = _P1 + _P2 + _P3 with _P1, _P2 carrying 27 significant bits each
_P1 = 6.283185303211212
_P2 = 3.968374295837407e-09
_P3 = 2.2884754904439327e-17
_ROUND = 6755399441055744.0  # 1.5 * 2**52, round-to-nearest trick

_FAST = {"contract"}


@njit(inline="always", fastmath=_FAST)
def _reduce(x):
    k = (x * INV_TWO_PI + _ROUND) - _ROUND
    return ((x - k * _P1) - k * _P2) - k * _P3


@njit(inline="always", fastmath=_FAST)
def _cos_poly(r):
    r2 = r * r
    p = 3.279889237069838e-30
    p = p * r2 - 2.4795962632247976e-27
    p = p * r2 + 1.6117375710961184e-24
    p = p * r2 - 8.896791392450574e-22
    p = p * r2 + 4.110317623312165e-19
    p = p * r2 - 1.5619206968586225e-16
    p = p * r2 + 4.779477332387385e-14
    p = p * r2 - 1.1470745597729725e-11
    p = p * r2 + 2.08767569878681e-09
    p = p * r2 - 2.755731922398589e-07
    p = p * r2 + 2.48015873015873e-05
    p = p * r2 - 0.001388888888888889
    p = p * r2 + 0.041666666666666664
    p = p * r2 - 0.5
    return p * r2 + 1.0


@njit(inline="always", fastmath=_FAST)
def _sin_poly(r):
    r2 = r * r
    p = -1.1309962886447716e-31
    p = p * r2 + 9.183689863795546e-29
    p = p * r2 - 6.446950284384474e-26
    p = p * r2 + 3.8681701706306835e-23
    p = p * r2 - 1.9572941063391263e-20
    p = p * r2 + 8.22063524662433e-18
    p = p * r2 - 2.8114572543455206e-15
    p = p * r2 + 7.647163731819816e-13
    p = p * r2 - 1.6059043836821613e-10
    p = p * r2 + 2.505210838544172e-08
    p = p * r2 - 2.7557319223985893e-06
    p = p * r2 + 0.0001984126984126984
    p = p * r2 - 0.008333333333333333
    p = p * r2 + 0.16666666666666666
    return r - r * r2 * p


@njit(inline="always")
def _two_sum_into(s, c, x):
    y = s + x
    bp = y - s
    return y, c + ((s - (y - bp)) + (x - bp))


@njit(nogil=True, cache=True)
def csum(buf, n):
    """Compensated sum of ``buf[:n]`` with four interleaved TwoSum lanes."""
    s0 = s1 = s2 = s3 = 0.0
    c0 = c1 = c2 = c3 = 0.0
    m = n - n % 4
    for i in range(0, m, 4):
        s0, c0 = _two_sum_into(s0, c0, buf[i])
        s1, c1 = _two_sum_into(s1, c1, buf[i + 1])
        s2, c2 = _two_sum_into(s2, c2, buf[i + 2])
        s3, c3 = _two_sum_into(s3, c3, buf[i + 3])
    for i in range(m, n):
        s0, c0 = _two_sum_into(s0, c0, buf[i])
    c = c0 + c1 + c2 + c3
    s = s0
    s, c = _two_sum_into(s, c, s1)
    s, c = _two_sum_into(s, c, s2)
    s, c = _two_sum_into(s, c, s3)
    return s + c


@njit(fastmath=_FAST, cache=True)
def _rs_terms(t, th, logn, rsq, out, n):
    for i in range(n):
        out[i] = th - t * logn[i]
    for i in range(n):
        out[i] = rsq[i] * _cos_poly(_reduce(out[i]))


@njit(inline="always")
def _theta(t, order):
    # valid for t >= 2; callers guarantee it
    th = 0.5 * t * math.log(t * INV_TWO_PI) - 0.5 * t - 0.125 * math.pi
    if order >= 1:
        th += 1.0 / (48.0 * t)
    if order >= 2:
        th += 7.0 / (5760.0 * t * t * t)
    return th


@njit(inline="always")
def _horner(row, z):
    acc = 0.0
    for i in range(row.shape[0] - 1, -1, -1):
        acc = acc * z + row[i]
    return acc


@njit(nogil=True, cache=True)
def rs_eval(ts, order, logn, rsq):
    """Riemann-Siegel Z(t) for positive ``ts``; ``order`` correction terms."""
    out = np.empty(ts.shape[0])
    buf = np.empty(logn.shape[0])
    for i in range(ts.shape[0]):
        t = ts[i]
        a = math.sqrt(t * INV_TWO_PI)
        nt = int(a)
        th = _theta(t, 2)
        _rs_terms(t, th, logn, rsq, buf, nt)
        z = 2.0 * csum(buf, nt)
        if order >= 1:
            zz = a - nt - 0.5
            corr = 0.0
            scale = 1.0
            for j in range(order):
                corr += scale * _horner(RS_COEFFS[j], zz)
                scale /= a
            sign = 1.0 if nt % 2 == 1 else -1.0
            z += sign * corr / math.sqrt(a)
        out[i] = z
    return out


@njit(nogil=True, cache=True)
def theta_eval(ts, order):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        out[i] = _theta(ts[i], order)
    return out


@njit(nogil=True, cache=True, fastmath=_FAST)
def dirichlet_sum(t, m):
    """Compensated sum_{n<=m} n^(-1/2 - i t); returns (re, im)."""
    sr = cr = si = ci = 0.0
    for n in range(1, m + 1):
        ln = math.log(n)
        r = _reduce(-t * ln)
        w = 1.0 / math.sqrt(n)
        sr, cr = _two_sum_into(sr, cr, w * _cos_poly(r))
        si, ci = _two_sum_into(si, ci, w * _sin_poly(r))
    return sr + cr, si + ci


@njit(nogil=True, cache=True)
def afe_sum(t, k, tau, b, dvals):
    """Smoothed main sum for Z^k; terms beyond ``b * tau`` vanish."""
    base = t * math.log(tau) - 0.5 * k * t - 0.125 * math.pi * k
    logb = math.log(b)
    nmax = min(int(b * tau), dvals.shape[0] - 1)
    s = c = 0.0
    for n in range(1, nmax + 1):
        u = math.log(n / tau) / logb
        if u <= -1.0:
            rho = 1.0
        elif u >= 1.0:
            continue
        else:
            rho = 0.5 * (1.0 - math.sin(0.5 * math.pi * u))
        x = rho * dvals[n] / math.sqrt(n) * _cos_poly(_reduce(base - t * math.log(n)))
        s, c = _two_sum_into(s, c, x)
    return 2.0 * (s + c)


@njit(nogil=True, cache=True, fastmath=_FAST)
def power_phase_sum(dvals, n0, n1, weight_exp, phase_scale, phase_offset):
    """sum_{n0<=n<=n1} d(n) n^w exp(i (s n^(2/3) + offset)); returns (re, im)."""
    sr = cr = si = ci = 0.0
    for n in range(n0, n1 + 1):
        r = _reduce(phase_scale * math.pow(n, 2.0 / 3.0) + phase_offset)
        w = dvals[n] * math.pow(n, weight_exp)
        sr, cr = _two_sum_into(sr, cr, w * _cos_poly(r))
        si, ci = _two_sum_into(si, ci, w * _sin_poly(r))
    return sr + cr, si + ci


@njit(nogil=True, cache=True, fastmath=_FAST)
def shifted_sum(hre, him, n0, n1, u):
    """sum h(n) n^(-1/6 + iU/3) exp(-3 pi i n^(2/3) - pi i / 8); returns (re, im)."""
    sr = cr = si = ci = 0.0
    for n in range(n0, n1 + 1):
        r = _reduce(u / 3.0 * math.log(n) - 3.0 * math.pi * math.pow(n, 2.0 / 3.0) - 0.125 * math.pi)
        c = _cos_poly(r)
        s = _sin_poly(r)
        w = math.pow(n, -1.0 / 6.0)
        sr, cr = _two_sum_into(sr, cr, w * (hre[n] * c - him[n] * s))
        si, ci = _two_sum_into(si, ci, w * (hre[n] * s + him[n] * c))
    return sr + cr, si + ci


@njit(nogil=True, cache=True)
def convolve_one(d):
    """Dirichlet convolution with the constant function 1 over 1..N."""
    n = d.shape[0] - 1
    e = np.zeros_like(d)
    for m in range(1, n + 1):
        v = d[m]
        for q in range(m, n + 1, m):
            e[q] += v
    return e


@njit(nogil=True, cache=True)
def shift_weight_table(d2, u, n):
    """h(m, U) for m <= n by a divisor sieve; returns (re, im) arrays."""
    hre = np.zeros(n + 1)
    him = np.zeros(n + 1)
    for delta in range(1, n + 1):
        ph = u * math.log(delta)
        wr = d2[delta] * math.cos(ph)
        wi = d2[delta] * math.sin(ph)
        for q in range(delta, n + 1, delta):
            hre[q] += wr
            him[q] += wi
    for m in range(1, n + 1):
        ph = -u * math.log(m)
        c = math.cos(ph)
        s = math.sin(ph)
        re = hre[m] * c - him[m] * s
        im = hre[m] * s + him[m] * c
        hre[m] = re
        him[m] = im
    return hre, him
