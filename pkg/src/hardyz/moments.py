"""Moment experiments for Z(t): signed and absolute moments, sign partitions,
explicit formulas with and without shifts, growth ratios, the log|Z|
distribution, and sums over phase points."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, oracle, zkernel
from .arith import DivisorTable, shift_weight_array
from .errors import DomainError, ResourceError
from .oscint import Integrand, QuadratureResult, integrate_segments
from .zeros import ZeroTable, scan_zeros

EULER_GAMMA = 0.57721566490153286061
EXPLICIT_FACTOR = 2.0 * math.pi * math.sqrt(2.0 / 3.0)
KOROLEV_C = 18.2
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MomentResult:
    k: int
    T0: float
    T1: float
    value: float
    err: float
    absolute: bool
    converged: bool = True


def _zeros_for(lo, hi, zeros: ZeroTable | None, threads=None) -> np.ndarray:
    """Zero ordinates in [lo, hi], from ``zeros`` when it covers the range."""
    lo = max(lo, 10.0)
    if hi <= lo:
        return np.zeros(0)
    if zeros is None or zeros.t_lo > lo or zeros.t_hi < hi:
        zeros = scan_zeros(lo, hi, threads=threads)
    g = zeros.gammas
    return g[(g >= lo) & (g <= hi)]


def moment_segments(T0, T1, specs, cuts=(), zeros=None, tol=1e-10, threads=None):
    """Integrals of Z**k or |Z|**k for each (k, absolute) in ``specs`` over the
    segments between T0, ``cuts`` and T1, from a single quadrature pass.

    Returns ``(cut_points, {spec: [QuadratureResult per segment]})``.
    """
    specs = [(int(k), bool(a)) for k, a in specs]
    for k, _ in specs:
        if k not in (1, 2, 3, 4):
            raise DomainError(f"k must be 1, 2, 3 or 4, got {k}")
    need_zeros = any(a and k % 2 for k, a in specs)
    bps = _zeros_for(T0, T1, zeros, threads) if need_zeros else ()
    integrands = [Integrand.power(k, a) for k, a in specs]
    pts, res = integrate_segments(T0, T1, integrands, tol, bps, cuts, threads)
    return pts, dict(zip(specs, res))


def f_moment(T0: float, T1: float, k: int, absolute: bool = False, tol: float = 1e-10,
             zeros=None, threads=None) -> MomentResult:
    """Integral of Z**k (or |Z|**k) over [T0, T1], T0 >= 0; the oracle covers t < 10."""
    if not 0.0 <= T0 < T1:
        raise DomainError(f"need 0 <= T0 < T1, got [{T0}, {T1}]")
    _, res = moment_segments(T0, T1, [(k, absolute)], (), zeros, tol, threads)
    q = res[(k, absolute)][0]
    value = abs(q.value) if absolute else q.value
    return MomentResult(k, float(T0), float(T1), value, q.err, absolute, q.converged)


def _sum_segments(results, i0, i1):
    return QuadratureResult(math.fsum(r.value for r in results[i0:i1]), math.fsum(r.err for r in results[i0:i1]),
                            sum(r.panels for r in results[i0:i1]), sum(r.evals for r in results[i0:i1]),
                            all(r.converged for r in results[i0:i1]))


def _cut_index(pts, x):
    i = int(np.searchsorted(pts, x))
    if i >= pts.shape[0] or pts[i] != x:
        raise ValueError(f"{x} is not a cut point")
    return i


# --- Korolev envelope and the first-moment ratio ---------------------------

@dataclass(frozen=True)
class KorolevRow:
    T: float
    F1: float
    err: float
    bound: float

    @property
    def ok(self) -> bool:
        return abs(self.F1) + self.err < self.bound


def korolev_from_segments(pts, segs, T_list, start=TWO_PI):
    i0 = _cut_index(pts, start)
    rows = []
    for T in T_list:
        q = _sum_segments(segs, i0, _cut_index(pts, float(T)))
        rows.append(KorolevRow(float(T), q.value, q.err, KOROLEV_C * float(T) ** 0.25))
    return rows


def korolev_scan(T_list, zeros=None, threads=None):
    """|integral of Z over [2 pi, T]| against 18.2 T^(1/4) on a grid of T."""
    T_list = sorted(float(T) for T in T_list)
    if T_list[0] <= TWO_PI:
        raise DomainError("every T must exceed 2*pi")
    pts, res = moment_segments(TWO_PI, T_list[-1], [(1, False)], T_list, zeros, threads=threads)
    return korolev_from_segments(pts, res[(1, False)], T_list)


def sign_changes(values) -> int:
    s = np.sign(np.asarray(values, dtype=np.float64))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def first_moment_ratio(T, zeros=None, threads=None):
    """|F_1(T)| / integral of |Z| over [0, T]."""
    _, res = moment_segments(0.0, T, [(1, False), (1, True)], (), zeros, threads=threads)
    return abs(res[(1, False)][0].value) / res[(1, True)][0].value


def cubic_trajectory(T_list, tol=1e-10, threads=None):
    """[(T, F_3(T), |F_3(T)| / T^(3/4))] with F_3(T) the integral of Z^3 over [0, T].

    Exploratory only: the trajectory is reported, no bound is asserted.
    """
    T_list = sorted(float(T) for T in T_list)
    pts, res = moment_segments(0.0, T_list[-1], [(3, False)], T_list[:-1], None, tol, threads)
    rows = []
    for T in T_list:
        q = _sum_segments(res[(3, False)], 0, _cut_index(pts, T))
        rows.append((T, q.value, abs(q.value) / T**0.75))
    return rows


# --- Sign partition ---------------------------------------------------------

@dataclass(frozen=True)
class SignPartition:
    """Maximal sign-constant pieces of Z on [T, T + H] with K+-, I+-."""

    T: float
    H: float
    intervals: list
    Kplus: float
    Kminus: float
    Iplus: float
    Iminus: float
    integral: float
    abs_integral: float
    err: float
    converged: bool = True


def sign_partition(T: float, H: float, zeros=None, tol=1e-10, threads=None) -> SignPartition:
    """Split [T, T+H] at zeros of Z and integrate Z over every piece."""
    T, H = float(T), float(H)
    if not (T >= 10.0 and H > 0):
        raise DomainError(f"need T >= 10 and H > 0, got T={T}, H={H}")
    g = _zeros_for(T, T + H, zeros, threads)
    g = g[(g > T) & (g < T + H)]
    pts, res = integrate_segments(T, T + H, [Integrand.power(1), Integrand.power(1, True)], tol, g, g, threads)
    signed, absolute = res
    mids = 0.5 * (pts[:-1] + pts[1:])
    signs = np.sign(zkernel.z_rs_many(mids, 5, threads)[0])
    lengths = np.diff(pts)
    pos = signs > 0
    vals = np.array([r.value for r in signed])
    intervals = [(float(a), float(b), "+" if s > 0 else "-") for a, b, s in zip(pts[:-1], pts[1:], signs)]
    return SignPartition(
        T, H, intervals,
        Kplus=math.fsum(lengths[pos]), Kminus=math.fsum(lengths[~pos]),
        Iplus=math.fsum(vals[pos]), Iminus=math.fsum(vals[~pos]),
        integral=math.fsum(vals), abs_integral=math.fsum(r.value for r in absolute),
        err=math.fsum(r.err for r in signed) + math.fsum(r.err for r in absolute),
        converged=all(r.converged for r in signed + absolute),
    )


def alternating_gap_sum(T: float, zeros: ZeroTable) -> float:
    """sum over T < gamma_2n <= 2T of gamma_2n - gamma_{2n-1}; needs global indices."""
    if zeros.t_lo > 14.0 or zeros.t_hi < 2.0 * T:
        raise DomainError("need a zero table starting below the first zero and reaching 2T")
    g = zeros.gammas
    n = zeros.first_index + np.arange(g.size)
    sel = (n % 2 == 0) & (g > T) & (g <= 2.0 * T) & (n >= 2)
    idx = np.nonzero(sel)[0]
    idx = idx[idx >= 1]
    return math.fsum(g[idx] - g[idx - 1])


# --- Explicit formulas -------------------------------------------------------

@dataclass(frozen=True)
class ExplicitFormulaResult:
    value: complex | float
    n_lo: int
    n_hi: int
    truncation: str
    empty: bool = False


def cubic_range(T: float):
    return int(math.ceil((T / TWO_PI) ** 1.5)), int(math.floor((T / math.pi) ** 1.5))


def cubic_rhs(T: float, table: DivisorTable) -> ExplicitFormulaResult:
    """2 pi sqrt(2/3) sum d_3(n) n^(-1/6) cos(3 pi n^(2/3) + pi/8) over (T/2pi)^1.5 <= n <= (T/pi)^1.5."""
    if table.k != 3:
        raise DomainError(f"need a d_3 table, got k={table.k}")
    n0, n1 = cubic_range(float(T))
    if n1 > table.limit:
        raise ResourceError(f"d_3 table covers {table.limit}, need {n1}", required=n1)
    if n1 < n0:
        return ExplicitFormulaResult(0.0, max(n0, 1), max(n1, 1), "none", empty=True)
    s = kernels.power_phase_sum(table.as_float(), n0, n1, -1.0 / 6.0, 3.0 * math.pi, math.pi / 8.0)
    return ExplicitFormulaResult(EXPLICIT_FACTOR * s.real, n0, n1, "none")


class HallVariant(str, enum.Enum):
    PRINTED = "printed"  # second constant 2*gamma - 1 - 2*pi
    LOG = "log"  # second constant 2*gamma - 1 - log(2*pi)


def hall_main(T: float, alpha: float, variant: HallVariant) -> float:
    c = 2.0 * EULER_GAMMA - 1.0 - (TWO_PI if HallVariant(variant) is HallVariant.PRINTED else math.log(TWO_PI))
    sinc = 1.0 if alpha == 0 else math.sin(alpha / 2.0) / (alpha / 2.0)
    return sinc * T * math.log(T) + c * T * math.cos(alpha / 2.0)


def hall_bound(T: float, alpha: float) -> float:
    return alpha * T / math.log(T) + math.sqrt(T) * math.log(T)


@dataclass(frozen=True)
class HallResult:
    T: float
    alpha: float
    lhs: float
    lhs_err: float
    mains: dict
    residuals: dict
    bound: float

    @property
    def best(self) -> HallVariant:
        return min(self.residuals, key=lambda v: abs(self.residuals[v]))


def hall_shifted(T: float, alpha: float, variant: HallVariant | None = None, tol=1e-10, threads=None):
    """Integral of Z(t) Z(t+U) over [0, T], U = alpha/log T, against both main-term variants.

    With ``variant`` given, returns ``(lhs, main)`` for that variant; otherwise a
    :class:`HallResult` comparing both.
    """
    T, alpha = float(T), float(alpha)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if T < 10:
        raise DomainError(f"T must be >= 10, got {T}")
    U = alpha / math.log(T)
    _, res = integrate_segments(0.0, T, [Integrand(((0.0, 1), (U, 1)))], tol, threads=threads)
    q = res[0][0]
    if variant is not None:
        return q.value, hall_main(T, alpha, variant)
    mains = {v: hall_main(T, alpha, v) for v in HallVariant}
    return HallResult(T, alpha, q.value, q.err, mains, {v: q.value - m for v, m in mains.items()},
                      hall_bound(T, alpha))


class RangeChoice(str, enum.Enum):
    PRINTED = "printed"  # T_1 <= n <= T_0 as written: empty
    ASCENDING = "ascending"  # (T/2pi)^1.5 <= n <= (T/pi)^1.5
    HALF = "half"  # (T/4pi)^1.5 <= n <= (T/2pi)^1.5, matching t in [T/2, T]


def shifted_range(T: float, choice: RangeChoice):
    choice = RangeChoice(choice)
    t0 = (T / TWO_PI) ** 1.5
    t1 = (T / math.pi) ** 1.5
    if choice is RangeChoice.PRINTED:
        lo, hi = t1, t0
    elif choice is RangeChoice.ASCENDING:
        lo, hi = t0, t1
    else:
        lo, hi = (T / (4.0 * math.pi)) ** 1.5, t0
    return int(math.ceil(lo)), int(math.floor(hi))


def shifted_cubic_rhs(T: float, U: float, range_choice: RangeChoice, table: DivisorTable) -> ExplicitFormulaResult:
    """Real part of 2 pi sqrt(2/3) sum h(n,U) n^(-1/6+iU/3) exp(-3 pi i n^(2/3) - pi i/8), K(n,U) = 0."""
    T, U = float(T), float(U)
    if table.k != 2:
        raise DomainError(f"need a d_2 table, got k={table.k}")
    if not 0.0 < U <= math.sqrt(T):
        raise DomainError(f"need 0 < U <= T^(1/2), got U={U}")
    n0, n1 = shifted_range(T, range_choice)
    if n1 < n0:
        return ExplicitFormulaResult(0.0, n0, n1, "K(n,U)=0", empty=True)
    if n1 > table.limit:
        raise ResourceError(f"d_2 table covers {table.limit}, need {n1}", required=n1)
    hre, him = shift_weight_array(U, table, n1)
    s = kernels.shifted_sum(hre, him, n0, n1, U)
    return ExplicitFormulaResult(EXPLICIT_FACTOR * s.real, n0, n1, "K(n,U)=0")


def shifted_cubic_lhs(T: float, U: float, tol=1e-10, threads=None) -> QuadratureResult:
    """Integral of Z(t)^2 Z(t+U) over [T/2, T]."""
    _, res = integrate_segments(T / 2.0, T, [Integrand(((0.0, 2), (float(U), 1)))], tol, threads=threads)
    return res[0][0]


def shifted_arbitration(T, U, table, tol=1e-10, threads=None):
    """Residual of each range choice against quadrature; returns (lhs, {choice: residual})."""
    lhs = shifted_cubic_lhs(T, U, tol, threads)
    return lhs, {c: lhs.value - shifted_cubic_rhs(T, U, c, table).value for c in RangeChoice}


# --- Growth of absolute moments ------------------------------------------------

@dataclass(frozen=True)
class GrowthRow:
    k: int
    T: float
    integral: float
    err: float

    @property
    def ratio(self) -> float:
        return self.integral / (self.T * math.log(self.T) ** (self.k**2 / 4.0))


def growth_from_segments(pts, segs_by_k, T_list):
    rows = []
    for k, segs in segs_by_k.items():
        for T in T_list:
            q = _sum_segments(segs, _cut_index(pts, float(T)), _cut_index(pts, 2.0 * float(T)))
            rows.append(GrowthRow(k, float(T), q.value, q.err))
    return rows


def growth_diagnostics(k, T_list, zeros=None, threads=None):
    """R_k(T) = integral of |Z|^k over [T, 2T] / (T (log T)^(k^2/4)) on dyadic T."""
    ks = [k] if np.isscalar(k) else list(k)
    T_list = sorted(float(T) for T in T_list)
    if T_list[0] < 10:
        raise DomainError("T must be >= 10")
    ratios = np.diff(T_list) / np.array(T_list[:-1])
    if np.any(np.abs(ratios - 1.0) > 1e-9):
        raise DomainError("T_list must be dyadic (each T twice the previous)")
    cuts = sorted(set(T_list) | {2.0 * T for T in T_list})
    pts, res = moment_segments(cuts[0], cuts[-1], [(kk, True) for kk in ks], cuts, zeros, threads=threads)
    return growth_from_segments(pts, {kk: res[(kk, True)] for kk in ks}, T_list)


def band(values) -> float:
    """max/min of positive values."""
    v = np.asarray(values, dtype=np.float64)
    return float(v.max() / v.min())


# --- Distribution of log|Z| -------------------------------------------------------

@dataclass(frozen=True)
class CltSample:
    T: float
    m: int
    values: np.ndarray = field(repr=False)
    ks_stat: float
    rejected: int
    seed: int


def ks_normal(x) -> float:
    """Kolmogorov-Smirnov distance between the sample and N(0, 1)."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    m = x.size
    cdf = np.array([0.5 * math.erfc(-v / math.sqrt(2.0)) for v in x])
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


CLT_GUARD = 1e-6


def clt_sample(T: float, m: int, seed: int, threads=None) -> CltSample:
    """log|Z(t)| / sqrt(log log T / 2) at m seeded uniform points of [T, 2T]."""
    T, m = float(T), int(m)
    if T < 1e3 or m < 1000:
        raise DomainError(f"need T >= 1e3 and m >= 1000, got T={T}, m={m}")
    rng = np.random.default_rng(seed)
    out = np.empty(0)
    rejected = 0
    while out.size < m:
        ts = T + T * rng.random(m - out.size)
        zs = zkernel.z_rs_many(np.concatenate([ts - CLT_GUARD, ts, ts + CLT_GUARD]), 5, threads)[0].reshape(3, -1)
        near = (np.sign(zs[0]) != np.sign(zs[1])) | (np.sign(zs[1]) != np.sign(zs[2])) | (zs[1] == 0)
        rejected += int(near.sum())
        out = np.concatenate([out, np.log(np.abs(zs[1][~near]))])
    values = out / math.sqrt(0.5 * math.log(math.log(T)))
    return CltSample(T, m, values, ks_normal(values), rejected, int(seed))


# --- Phase points ---------------------------------------------------------------------

@dataclass(frozen=True)
class PhasePointResult:
    T: float
    phi: float
    empirical: complex
    main: complex
    count: int
    max_rel_imag: float  # max |Im| / |summand| after rotating by e^(-i phi)

    @property
    def relative_residual(self) -> float:
        return abs(self.empirical - self.main) / abs(self.main) if self.main else float("inf")


def phase_points(T: float, phi: float):
    """Heights 10 <= t_j <= T with theta(t_j) = j pi - phi, and the indices j."""
    th_lo, th_hi = zkernel.theta_many(np.array([10.0, T]))
    j = np.arange(math.ceil((th_lo + phi) / math.pi), math.floor((th_hi + phi) / math.pi) + 1)
    target = j * math.pi - phi
    lo = np.full(j.shape, 10.0)
    hi = np.full(j.shape, float(T))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = zkernel.theta_many(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 4.0 * np.spacing(hi)):
            break
    # finish with Newton steps from the bracket midpoint
    t = 0.5 * (lo + hi)
    for _ in range(2):
        t = t - (zkernel.theta_many(t) - target) / (0.5 * np.log(t / TWO_PI))
    return j, t


def phase_point_sum(T: float, phi: float, threads=None) -> PhasePointResult:
    """Sum of zeta(1/2+it) over phase points t <= T versus
    2 e^(i phi) cos(phi) (T/2pi) log(T/(2 pi e))."""
    T, phi = float(T), float(phi)
    if not 0.0 <= phi < math.pi:
        raise DomainError(f"phi must lie in [0, pi), got {phi}")
    if T < 10:
        raise DomainError(f"T must be >= 10, got {T}")
    j, t = phase_points(T, phi)
    z = zkernel.z_rs_many(t, 5, threads)[0]
    # theta(t_j) - (j pi - phi), computed without forming the large phase twice
    resid = zkernel.theta_many(t) - (j * math.pi - phi)
    parity = np.where(j % 2 == 0, 1.0, -1.0)
    rotated = parity * z * np.exp(-1j * resid)  # e^(-i phi) * zeta(1/2 + i t_j)
    summands = np.exp(1j * phi) * rotated
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(z != 0, np.abs(rotated.imag) / np.abs(rotated), 0.0)
    emp = complex(math.fsum(summands.real), math.fsum(summands.imag))
    x = T / TWO_PI
    main = 2.0 * complex(math.cos(phi), math.sin(phi)) * math.cos(phi) * x * math.log(x / math.e)
    return PhasePointResult(T, phi, emp, main, int(t.size), float(rel.max()) if rel.size else 0.0)


def oracle_moment(T0, T1, k, nodes=40):
    """Gauss-Legendre integral of Z**k on a short range from oracle values (reference use)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    ts = 0.5 * (T1 - T0) * x + 0.5 * (T1 + T0)
    return 0.5 * (T1 - T0) * float(np.dot(w, oracle.z_oracle_many(ts) ** k))
