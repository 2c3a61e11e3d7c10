"""Evaluators for theta(t), Z(t) and zeta(1/2 + it) on the critical line.

Three independent routes are provided: the Riemann-Siegel main sum with
optional corrections (``z_rs``), the truncated Dirichlet series with its
Euler-Maclaurin tail term (``zeta_dirichlet``), and the smoothed approximate
functional equation for Z^k (``z_pow_afe``).  The multiprecision oracle lives
in :mod:`hardyz.oracle` and shares no code with these.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import constants, kernels
from .errors import DomainError, ResourceError

EPS = np.finfo(np.float64).eps
MAX_RS_ORDER = 5
# first omitted term of the Stirling expansion of theta, by order; theta()
# widens it since the series is only asymptotic (see _tail_factor)
_THETA_TAIL = (
    lambda t: 1.0 / (48.0 * t),
    lambda t: 7.0 / (5760.0 * t**3),
    lambda t: 31.0 / (80640.0 * t**5),
)


def _tail_factor(t):
    # observed |error| / first omitted term stays below 1.2 for t >= 10 and
    # grows like t^-4 below that; this envelope covers both with margin
    return 2.0 + 4000.0 / t**4


class Method(str, enum.Enum):
    RS0 = "RS0"
    RS1 = "RS1"
    RS2 = "RS2"
    RS3 = "RS3"
    RS4 = "RS4"
    RS5 = "RS5"
    DIRICHLET = "Dirichlet"
    ORACLE = "Oracle"
    AFE = "AFE"


@dataclass(frozen=True)
class PhaseValue:
    theta: float
    err: float


@dataclass(frozen=True)
class ZValue:
    """A computed Z(t), Z^k(t) or zeta(1/2+it) with an absolute error bound."""

    value: object
    err: float
    method: Method
    t: float

    def agrees_with(self, other: "ZValue") -> bool:
        return abs(self.value - other.value) <= self.err + other.err


@dataclass(frozen=True)
class AfeParams:
    """Moment exponent and test-function shape for ``z_pow_afe``.

    ``tau_base`` selects tau = (t / base)^(k/2).  The default 2*pi makes the
    phase t*log(tau/n) - k*t/2 - pi*k/8 equal k*theta(t) - t*log(n) to leading
    order; ``"pi"`` reproduces the printed (t/pi)^(k/2) for comparison.
    """

    k: int
    b: float = 2.0
    tau_base: str = "2pi"

    def __post_init__(self):
        if self.k not in (1, 2, 3):
            raise DomainError(f"k must be 1, 2 or 3, got {self.k}")
        if not self.b > 1.0:
            raise DomainError(f"b must exceed 1, got {self.b}")
        if self.tau_base not in ("2pi", "pi"):
            raise DomainError(f"tau_base must be '2pi' or 'pi', got {self.tau_base!r}")

    def tau(self, t: float) -> float:
        base = 2.0 * math.pi if self.tau_base == "2pi" else math.pi
        return (t / base) ** (self.k / 2.0)


def theta(t: float, order: int = 2) -> PhaseValue:
    """Riemann-Siegel theta from its Stirling expansion; odd in t."""
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    at = abs(float(t))
    if not math.isfinite(at) or at < 2.0:
        raise DomainError(f"theta expansion needs |t| >= 2, got t={t}")
    th = float(kernels.theta_eval(np.array([at]), order)[0])
    err = _THETA_TAIL[order](at) * _tail_factor(at) + 4.0 * EPS * abs(th)
    return PhaseValue(th if t > 0 else -th, err)


def theta_many(ts, order: int = 2) -> np.ndarray:
    """Vectorised ``theta(...).theta`` for heights >= 2."""
    ts = np.asarray(ts, dtype=np.float64)
    at = np.abs(ts)
    if at.size and at.min() < 2.0:
        raise DomainError("theta expansion needs |t| >= 2")
    return np.sign(ts) * kernels.theta_eval(at, order)


def rs_error_bound(t, order):
    """Calibrated truncation bound plus a rounding allowance for the phase."""
    t = np.asarray(t, dtype=np.float64)
    trunc = constants.rs_constant(order) * t ** (-(2 * order + 1) / 4.0)
    logt = np.log(t)
    rounding = 8.0 * EPS * t * logt * np.sqrt(1.0 + logt)
    return trunc + rounding


def z_rs_many(ts, order: int = 1, threads=None):
    """Values and error bounds of the Riemann-Siegel Z at many heights.

    ``order`` counts correction terms: 0 is the bare main sum, 1 adds C_0,
    and up to 5 (C_0..C_4) are available.  Heights need |t| >= 10.
    """
    if not 0 <= order <= MAX_RS_ORDER:
        raise DomainError(f"order must be in 0..{MAX_RS_ORDER}, got {order}")
    at = np.abs(np.asarray(ts, dtype=np.float64))
    if at.size and not (np.all(np.isfinite(at)) and at.min() >= 10.0):
        raise DomainError("Riemann-Siegel evaluation needs |t| >= 10; use the oracle below")
    return kernels.rs_eval(at, order, threads), rs_error_bound(at, order)


def z_rs(t: float, order: int = 1) -> ZValue:
    """Z(t) from the Riemann-Siegel formula, with Z(-t) = Z(t)."""
    vals, errs = z_rs_many(np.array([float(t)]), order)
    return ZValue(float(vals[0]), float(errs[0]), Method(f"RS{order}"), float(t))


def zeta_dirichlet(t: float, T: float) -> ZValue:
    """zeta(1/2+it) = sum_{n<=T} n^(-1/2-it) + T^(1/2-it)/(it-1/2) + O(T^-1/2)."""
    t, T = float(t), float(T)
    if T < 10.0:
        raise DomainError(f"T must be >= 10, got {T}")
    if not T <= t <= 2.0 * T:
        raise DomainError(f"t={t} outside the validity window [T, 2T] = [{T}, {2 * T}]")
    head = kernels.dirichlet_sum(t, int(math.floor(T)))
    tail = complex(math.sqrt(T) * math.cos(-t * math.log(T)), math.sqrt(T) * math.sin(-t * math.log(T)))
    value = head + tail / complex(-0.5, t)
    err = constants.dirichlet_constant() * T**-0.5 + 8.0 * EPS * t * math.log(T) * math.sqrt(1.0 + math.log(T))
    return ZValue(value, err, Method.DIRICHLET, t)


def afe_error_bound(t: float, k: int) -> float:
    return constants.afe_constant() * t ** (k / 4.0 - 1.0) * math.log(t) ** (k - 1)


def z_pow_afe(t: float, params: AfeParams, rho=None, table=None) -> ZValue:
    """Z(t)^k from the smoothed approximate functional equation.

    ``rho`` is an :class:`hardyz.arith.TestFunction` (default: plateau edge
    ``params.b``); ``table`` a divisor table of order k covering n <= b*tau.
    Without a table one is sieved on the spot.
    """
    from .arith import TestFunction, sieve_dk

    t = float(t)
    if t < 10.0:
        raise DomainError(f"approximate functional equation needs t >= 10, got {t}")
    b = params.b if rho is None else rho.b
    if rho is None:
        rho = TestFunction(b)
    tau = params.tau(t)
    need = int(b * tau) + 1
    if table is None:
        table = sieve_dk(params.k, need)
    if table.k != params.k:
        raise DomainError(f"divisor table has k={table.k}, need k={params.k}")
    if table.limit < need:
        raise ResourceError(f"divisor table covers n <= {table.limit}; need N = {need}", required=need)
    value = kernels.afe_sum(t, params.k, tau, rho.b, table.as_float())
    return ZValue(value, afe_error_bound(t, params.k), Method.AFE, t)


def dirichlet_integral(T: float) -> complex:
    """Termwise integral over [T, 2T] of the main sum sum_{n<=T} n^(-1/2-it).

    The n = 1 term contributes T and every other term is O(n^-1/2 / log n),
    so the total is T + O(T^(1/2)).
    """
    T = float(T)
    if T < 10.0:
        raise DomainError(f"T must be >= 10, got {T}")
    n = np.arange(2, int(math.floor(T)) + 1, dtype=np.float64)
    ln = np.log(n)
    terms = n**-0.5 * (np.exp(-2j * T * ln) - np.exp(-1j * T * ln)) / (-1j * ln)
    return complex(T + math.fsum(terms.real), math.fsum(terms.imag))
