"""Multiprecision reference values for theta, zeta(1/2+it) and Z(t).

Deliberately independent of :mod:`hardyz.zkernel`: theta comes from the
log-gamma function, zeta from the Euler-Maclaurin continuation of the
Dirichlet series (backend ``"em"``) or from Arb's certified ball arithmetic
via python-flint (backend ``"arb"``).  ``"auto"`` prefers Arb when present,
since the pure-mpmath route costs O(t) multiprecision powers per call.
"""
from __future__ import annotations

import math
import threading

import mpmath
import numpy as np

from .errors import DomainError
from .zkernel import Method, ZValue

try:
    import flint
except ImportError:  # pragma: no cover - optional dependency
    flint = None

_flint_lock = threading.Lock()


def available_backends():
    return ("em", "arb") if flint is not None else ("em",)


def _resolve(backend):
    if backend == "auto":
        return "arb" if flint is not None else "em"
    if backend not in ("em", "arb"):
        raise ValueError(f"unknown oracle backend {backend!r}")
    if backend == "arb" and flint is None:
        raise ValueError("backend 'arb' needs python-flint")
    return backend


def _check_digits(digits):
    if not 1 <= digits <= 50:
        raise DomainError(f"digits must be in 1..50, got {digits}")


def _work_dps(t, digits):
    return digits + 12 + int(math.log10(2.0 + abs(float(t))))


def _zeta_em(s, eps):
    """Euler-Maclaurin for zeta(s) at the ambient mpmath precision."""
    big = abs(s)
    n_cut = max(12, int(1.2 * big / (2 * math.pi)) + 12)
    while True:
        head = mpmath.fsum(mpmath.power(n, -s) for n in range(1, n_cut))
        nn = mpmath.mpf(n_cut)
        npow = mpmath.power(nn, -s)
        tail = nn * npow / (s - 1) + npow / 2
        rising = s
        power = npow / nn
        last = mpmath.inf
        for j in range(1, 400):
            term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * power
            size = abs(term)
            if size > last:
                break
            tail += term
            if size < eps:
                return head + tail
            last = size
            rising *= (s + 2 * j - 1) * (s + 2 * j)
            power /= nn * nn
        n_cut *= 2


def theta_oracle(t, digits=20):
    """theta(t) = arg Gamma(1/4 + it/2) - (t/2) log pi, continuous branch."""
    _check_digits(digits)
    with mpmath.workdps(_work_dps(t, digits)):
        t = mpmath.mpf(t)
        val = mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 4 + 0.5j * t)) - t / 2 * mpmath.log(mpmath.pi)
    return +val


def chi_oracle(s, digits=20):
    """chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s)."""
    _check_digits(digits)
    with mpmath.workdps(digits + 10):
        s = mpmath.mpmathify(s)
        val = mpmath.power(2, s) * mpmath.power(mpmath.pi, s - 1) * mpmath.sinpi(s / 2) * mpmath.gamma(1 - s)
    return +val


def _arb_to_mpf(x):
    man, exp = x.mid().man_exp()
    return mpmath.ldexp(mpmath.mpf(int(man)), int(exp)), float(x.rad())


def _arb_hardy(t, digits):
    prec = int(3.33 * digits) + 30 + int(math.log2(2.0 + abs(float(t))))
    with _flint_lock:
        saved = flint.ctx.prec
        flint.ctx.prec = prec
        try:
            tt = flint.arb(mpmath.nstr(mpmath.mpf(t), 40)) if not isinstance(t, float) else flint.arb(t)
            zeta = flint.acb(flint.arb(0.5), tt).zeta()
            th = flint.acb(flint.arb(0.25), tt / 2).lgamma().imag - tt / 2 * flint.arb.pi().log()
            z = (flint.acb(0, 1) * th).exp() * zeta
            zr, zr_rad = _arb_to_mpf(z.real)
            zi, zi_rad = _arb_to_mpf(z.imag)
            xr, xr_rad = _arb_to_mpf(zeta.real)
            xi, xi_rad = _arb_to_mpf(zeta.imag)
        finally:
            flint.ctx.prec = saved
    return mpmath.mpc(zr, zi), max(zr_rad, zi_rad), mpmath.mpc(xr, xi), max(xr_rad, xi_rad)


def zeta_oracle(t, digits=20, backend="auto"):
    """zeta(1/2 + it) as an mpmath complex, accurate to ``digits``."""
    _check_digits(digits)
    backend = _resolve(backend)
    if backend == "arb":
        return _arb_hardy(t, digits)[2]
    with mpmath.workdps(_work_dps(t, digits)):
        s = mpmath.mpc(0.5, mpmath.mpf(t))
        val = _zeta_em(s, mpmath.mpf(10) ** (-digits - 6))
    return +val


def hardy_complex_oracle(t, digits=20, backend="auto"):
    """e^(i theta(t)) zeta(1/2+it) before discarding the imaginary part."""
    _check_digits(digits)
    backend = _resolve(backend)
    if backend == "arb":
        return _arb_hardy(t, digits)[0]
    with mpmath.workdps(_work_dps(t, digits)):
        tt = mpmath.mpf(t)
        s = mpmath.mpc(0.5, tt)
        zeta = _zeta_em(s, mpmath.mpf(10) ** (-digits - 6))
        th = mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 4 + 0.5j * tt)) - tt / 2 * mpmath.log(mpmath.pi)
        val = mpmath.expj(th) * zeta
    return +val


def z_oracle(t, digits=20, backend="auto") -> ZValue:
    """Hardy's Z(t) to ``digits`` digits for any real t (slow path)."""
    val = hardy_complex_oracle(t, digits, backend)
    real = mpmath.re(val)
    err = float(mpmath.mpf(10) ** (-digits)) * max(1.0, abs(float(real)))
    return ZValue(real, err, Method.ORACLE, float(t))


def z_oracle_many(ts, digits=20, backend="auto"):
    """Float array of oracle Z values (each correct to ``digits`` before rounding)."""
    return np.array([float(z_oracle(float(t), digits, backend).value) for t in np.ravel(ts)])
