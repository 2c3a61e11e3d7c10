"""Oscillation-aware quadrature of products of Z, a stationary-phase
evaluator, and exponential sums with d_3 coefficients.

Integrals are split into panels no wider than pi / (log(t/2pi) + 1), which
is at most a quarter of the shortest local period of Z.  Each panel gets a
15-point Gauss-Kronrod rule, and the embedded 7-point Gauss rule supplies
the error estimate.  Panels whose estimate misses the tolerance are bisected.
Panel edges also sit at Riemann-Siegel block boundaries t = 2 pi m^2, at the
switch to the oracle below t = 10 and, for absolute values, at zeros.  So
every panel integrand is smooth.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels, oracle, parallel, zkernel
from .arith import DivisorTable
from .errors import DomainError, ResourceError

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # ascending, 15 nodes
W_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_G = np.zeros(15)
W_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])
_EPMACH = np.finfo(np.float64).eps
_UFLOW = np.finfo(np.float64).tiny

ORACLE_BELOW = 10.0
ORACLE_PANEL = 0.5
RS_ORDER = 5
PANEL_CHUNK = 4096
MAX_DEPTH = 40


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    err: float
    panels: int
    evals: int
    converged: bool = True

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.err + other.err, self.panels + other.panels,
                                self.evals + other.evals, self.converged and other.converged)


@dataclass(frozen=True)
class Integrand:
    """prod_j Z(t + shift_j)**power_j, optionally in absolute value."""

    factors: tuple = ((0.0, 1),)
    absolute: bool = False

    def __post_init__(self):
        if not self.factors:
            raise DomainError("integrand needs at least one factor")
        for shift, power in self.factors:
            if power < 1:
                raise DomainError(f"powers must be positive integers, got {power}")

    @classmethod
    def power(cls, k: int, absolute: bool = False) -> "Integrand":
        return cls(((0.0, int(k)),), absolute)

    @property
    def shifts(self):
        return sorted({float(s) for s, _ in self.factors})


# --- panel layout ---------------------------------------------------------

def _w(t):
    return t * np.log(t / (2.0 * math.pi)) / math.pi


def _w_inv(w):
    """Inverse of w(t) = t log(t/2pi)/pi on t >= 10 by Newton's method."""
    w = np.asarray(w, dtype=np.float64)
    t = np.maximum(np.pi * w / np.maximum(np.log(np.maximum(np.pi * w, 20.0) / (2.0 * math.pi)), 0.5), 10.0)
    for _ in range(60):
        step = (_w(t) - w) * math.pi / (np.log(t / (2.0 * math.pi)) + 1.0)
        t = np.maximum(t - step, 10.0)
        if np.all(np.abs(step) <= 4.0 * _EPMACH * t):
            break
    return t


def panel_cap(t):
    """Maximum panel width at height t."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t < ORACLE_BELOW, ORACLE_PANEL, math.pi / (np.log(np.maximum(t, ORACLE_BELOW) / (2.0 * math.pi)) + 1.0))


def _rs_breaks(lo, hi, shift):
    """Points where the Riemann-Siegel block changes for Z(t + shift)."""
    a, b = lo + shift, hi + shift
    m0 = int(math.ceil(math.sqrt(max(a, 0.0) / (2.0 * math.pi))))
    m1 = int(math.floor(math.sqrt(max(b, 0.0) / (2.0 * math.pi))))
    pts = [2.0 * math.pi * m * m - shift for m in range(max(m0, 1), m1 + 1)]
    pts.append(ORACLE_BELOW - shift)
    return pts


def panel_edges(T0, T1, breakpoints=()):
    """Sorted panel edges over [T0, T1] honouring the width cap and ``breakpoints``."""
    edges = [np.array([T0, T1])]
    if T0 < ORACLE_BELOW:
        hi = min(T1, ORACLE_BELOW)
        n = max(1, int(math.ceil((hi - T0) / ORACLE_PANEL)))
        edges.append(np.linspace(T0, hi, n + 1))
    if T1 > ORACLE_BELOW:
        lo = max(T0, ORACLE_BELOW)
        w0, w1 = _w(np.array([lo, T1]))
        grid = np.arange(math.ceil(w0), math.floor(w1) + 1, dtype=np.float64)
        edges.append(_w_inv(grid))
    bp = np.asarray(list(breakpoints), dtype=np.float64)
    edges.append(bp[(bp > T0) & (bp < T1)])
    e = np.unique(np.concatenate(edges))
    e = e[(e >= T0) & (e <= T1)]
    # merge slivers created by near-coincident points, keeping both ends
    keep = np.ones(e.shape[0], dtype=bool)
    keep[1:] = np.diff(e) > 1e-12 * np.maximum(1.0, e[1:])
    keep[-1] = True
    e = e[keep]
    if e.shape[0] >= 3 and e[-1] - e[-2] <= 1e-12 * max(1.0, e[-1]):
        e = np.delete(e, -2)
    return e


# --- integrand evaluation --------------------------------------------------

def _z_values(ts, threads):
    """Z at arbitrary real heights: RS above 10, oracle below, with error bounds."""
    ts = np.asarray(ts, dtype=np.float64)
    at = np.abs(ts)
    vals = np.empty_like(at)
    errs = np.empty_like(at)
    big = at >= ORACLE_BELOW
    if big.any():
        vals[big], errs[big] = zkernel.z_rs_many(at[big], RS_ORDER, threads)
    small = np.nonzero(~big)[0]
    for i in small:
        zv = oracle.z_oracle(float(at[i]), 20)
        vals[i], errs[i] = float(zv.value), zv.err
    return vals, errs


def _integrand_values(ts, integrands, threads):
    """Values and propagated evaluation errors of each integrand at ``ts``."""
    shifts = sorted({s for f in integrands for s in f.shifts})
    zv = {s: _z_values(ts + s, threads) for s in shifts}
    out_v, out_e = [], []
    for f in integrands:
        val = np.ones_like(ts)
        for s, p in f.factors:
            val = val * zv[float(s)][0] ** p
        err = np.zeros_like(ts)
        for j, (s, p) in enumerate(f.factors):
            z, e = zv[float(s)]
            term = p * (np.abs(z) + e) ** (p - 1) * e
            for i, (s2, p2) in enumerate(f.factors):
                if i != j:
                    term = term * (np.abs(zv[float(s2)][0]) + zv[float(s2)][1]) ** p2
            err += term
        out_v.append(np.abs(val) if f.absolute else val)
        out_e.append(err)
    return out_v, out_e


def _gk(a, b, integrands, threads):
    """G7/K15 on panels [a_i, b_i].

    Returns arrays of shape (F, P): Kronrod values, QUADPACK-style error
    estimates, integrals of |f|, and the integrated evaluation-error model.
    """
    half = 0.5 * (b - a)
    centre = 0.5 * (a + b)
    ts = (centre[:, None] + half[:, None] * NODES[None, :]).ravel()
    vals, verrs = _integrand_values(ts, integrands, threads)
    res, err, resabs, model = [], [], [], []
    for v, ve in zip(vals, verrs):
        v = v.reshape(-1, 15)
        rk = (v @ W_K) * half
        rg = (v @ W_G) * half
        ra = (np.abs(v) @ W_K) * half
        mean = (v @ W_K) / 2.0
        rasc = (np.abs(v - mean[:, None]) @ W_K) * half
        e = np.abs(rk - rg)
        with np.errstate(divide="ignore", invalid="ignore"):
            e = np.where((rasc != 0) & (e != 0), rasc * np.minimum(1.0, (200.0 * e / rasc) ** 1.5), e)
        e = np.where(ra > _UFLOW / (50.0 * _EPMACH), np.maximum(50.0 * _EPMACH * ra, e), e)
        res.append(rk)
        err.append(e)
        resabs.append(ra)
        model.append((ve.reshape(-1, 15) @ W_K) * half)
    return np.array(res), np.array(err), np.array(resabs), np.array(model)


def _chunk_task(args):
    """Integrate one block of panels adaptively; returns per-panel sums."""
    a, b, integrands, tol, budget, threads = args
    val, err, rabs, model = _gk(a, b, integrands, threads)
    evals = 15 * a.shape[0]
    panels = np.ones(a.shape[0], dtype=np.int64)
    converged = True
    # work list: (owner panel index, lo, hi, depth)
    owner = np.arange(a.shape[0])
    lo, hi = a.copy(), b.copy()
    cur_v, cur_e, cur_a, cur_m = val, err, rabs, model
    depth = 0
    final_v = np.zeros_like(val)
    final_e = np.zeros_like(err)
    final_m = np.zeros_like(model)
    while True:
        # a panel is done once its estimate is within tolerance or below the
        # evaluation-noise floor, which bisection cannot reduce
        bad = np.any((cur_e > tol * cur_a + 1e-300) & (cur_e > cur_m), axis=0)
        good = ~bad
        if depth >= MAX_DEPTH or evals >= budget:
            if bad.any():
                converged = False
            good = np.ones_like(bad)
            bad = ~good
        for f in range(val.shape[0]):
            np.add.at(final_v[f], owner[good], cur_v[f][good])
            np.add.at(final_e[f], owner[good], cur_e[f][good])
            np.add.at(final_m[f], owner[good], cur_m[f][good])
        if not bad.any():
            break
        o, l, h = owner[bad], lo[bad], hi[bad]
        m = 0.5 * (l + h)
        owner = np.concatenate([o, o])
        lo = np.concatenate([l, m])
        hi = np.concatenate([m, h])
        np.add.at(panels, o, 1)
        cur_v, cur_e, cur_a, cur_m = _gk(lo, hi, integrands, threads)
        evals += 15 * lo.shape[0]
        depth += 1
    return final_v, final_e, final_m, panels, evals, converged


def integrate_segments(T0: float, T1: float, integrands: Sequence[Integrand], tol: float = 1e-10,
                       breakpoints=(), cuts=(), threads=None, max_evals: int | None = None):
    """Integrate several integrands over [T0, T1] on a shared panel layout.

    Returns ``(cuts_used, results)`` where ``results[f][s]`` is the
    :class:`QuadratureResult` of integrand ``f`` over segment ``s`` between
    consecutive entries of ``cuts_used`` (T0, the interior ``cuts``, T1).
    ``tol`` is relative: each panel must satisfy err <= tol * integral of |f|.
    """
    T0, T1 = float(T0), float(T1)
    if not T0 < T1:
        raise DomainError(f"need T0 < T1, got [{T0}, {T1}]")
    if T0 < 0:
        raise DomainError("integration range must lie in t >= 0")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    integrands = list(integrands)
    cuts = np.unique(np.asarray([c for c in cuts if T0 < c < T1], dtype=np.float64))
    bps = [np.asarray(list(breakpoints), dtype=np.float64), cuts]
    for f in integrands:
        for s, _ in f.factors:
            bps.append(np.asarray(_rs_breaks(T0, T1, float(s))))
    edges = panel_edges(T0, T1, np.concatenate(bps))
    a, b = edges[:-1], edges[1:]
    n_panels = a.shape[0]
    if max_evals is None:
        max_evals = 64 * 15 * n_panels + 10_000
    cut_points = np.concatenate([[T0], cuts, [T1]])
    seg_of_panel = np.searchsorted(cut_points, 0.5 * (a + b), side="right") - 1
    slices = parallel.chunk_slices(n_panels, PANEL_CHUNK)
    # the first pass over every panel is always done; the budget limits bisection
    per_chunk_budget = max_evals // max(1, len(slices))
    tasks = [(a[sl], b[sl], integrands, tol, per_chunk_budget, None) for sl in slices]
    outs = parallel.map_ordered(_chunk_task, tasks, threads)
    n_seg = cut_points.shape[0] - 1
    F = len(integrands)
    parts_v = [[[] for _ in range(n_seg)] for _ in range(F)]
    parts_e = [[[] for _ in range(n_seg)] for _ in range(F)]
    seg_panels = np.zeros(n_seg, dtype=np.int64)
    seg_evals = np.zeros(n_seg, dtype=np.int64)
    seg_conv = np.ones(n_seg, dtype=bool)
    for sl, (fv, fe, fm, pan, ev, conv) in zip(slices, outs):
        seg = seg_of_panel[sl]
        bounds = np.flatnonzero(np.diff(seg)) + 1
        starts = np.concatenate([[0], bounds])
        stops = np.concatenate([bounds, [seg.shape[0]]])
        for s0, s1 in zip(starts, stops):
            sid = int(seg[s0])
            for f in range(F):
                parts_v[f][sid].append(math.fsum(fv[f][s0:s1]))
                parts_e[f][sid].append(math.fsum(fe[f][s0:s1]) + math.fsum(fm[f][s0:s1]))
            seg_panels[sid] += int(pan[s0:s1].sum())
            seg_evals[sid] += 15 * int(pan[s0:s1].sum())
            if not conv:
                seg_conv[sid] = False
    results = [[QuadratureResult(math.fsum(parts_v[f][s]), math.fsum(parts_e[f][s]), int(seg_panels[s]),
                                 int(seg_evals[s]) * len(integrands[f].shifts), bool(seg_conv[s]))
                for s in range(n_seg)] for f in range(F)]
    return cut_points, results


def _zero_breaks(T0, T1, integrands, zero_table, threads):
    """Zeros of each shifted factor, mapped back to the integration variable."""
    need = [f for f in integrands if f.absolute or any(p % 2 for _, p in f.factors)]
    if not need:
        return np.zeros(0)
    from .zeros import scan_zeros

    pts = []
    for s in sorted({float(s) for f in need for s, _ in f.factors}):
        lo, hi = max(T0 + s, 10.0), T1 + s
        if hi <= lo:
            continue
        if zero_table is not None and zero_table.t_lo <= lo and zero_table.t_hi >= hi:
            g = zero_table.gammas
        else:
            g = scan_zeros(lo, hi, threads=threads).gammas
        pts.append(g - s)
    return np.concatenate(pts) if pts else np.zeros(0)


def integrate_zk(T0: float, T1: float, k: int, absolute: bool = False, tol: float = 1e-10,
                 threads=None, zeros=None, max_evals: int | None = None) -> QuadratureResult:
    """Integral of Z(t)**k (or |Z(t)|**k) over [T0, T1] with T0 >= 10.

    For odd k the zeros of Z become panel edges (scanned unless ``zeros``
    covers the range), so each panel integrand is smooth.
    """
    T0, T1 = float(T0), float(T1)
    if not 10.0 <= T0 < T1:
        raise DomainError(f"need 10 <= T0 < T1, got [{T0}, {T1}]")
    if k not in (1, 2, 3, 4):
        raise DomainError(f"k must be 1, 2, 3 or 4, got {k}")
    f = Integrand.power(k, absolute)
    bps = _zero_breaks(T0, T1, [f], zeros, threads) if (absolute and k % 2) else ()
    _, res = integrate_segments(T0, T1, [f], tol, bps, threads=threads, max_evals=max_evals)
    return res[0][0]


def integrate_product(T0: float, T1: float, factors, absolute: bool = False, tol: float = 1e-10,
                      threads=None, zeros=None) -> QuadratureResult:
    """Integral of prod Z(t + shift)**power over [T0, T1] with T0 >= 0."""
    f = Integrand(tuple((float(s), int(p)) for s, p in factors), absolute)
    bps = _zero_breaks(T0, T1, [f], zeros, threads) if absolute else ()
    _, res = integrate_segments(T0, T1, [f], tol, bps, threads=threads)
    return res[0][0]


# --- stationary phase ---------------------------------------------------------

@dataclass(frozen=True)
class SaddleSpec:
    """Phase f with derivatives on [a, b] and the scale parameters A, V."""

    f: Callable[[float], float]
    f1: Callable[[float], float]
    f2: Callable[[float], float]
    f3: Callable[[float], float]
    f4: Callable[[float], float]
    a: float
    b: float
    A: float
    V: float
    check_points: int = field(default=33, compare=False)

    def validate(self):
        if not (self.A > 0 and self.V > 0):
            raise DomainError("A and V must be positive")
        if not 0.0 < self.b - self.a <= self.V * (1.0 + 1e-12):
            raise DomainError(f"need 0 < b - a <= V; got b - a = {self.b - self.a}, V = {self.V}")
        xs = np.linspace(self.a, self.b, self.check_points)
        f2 = np.array([self.f2(x) for x in xs])
        if not np.all(f2 > 0):
            raise DomainError("f'' must be positive on [a, b]")


def _stationary(spec, tol=1e-12):
    """Root of f' in [a, b] by bisection-safeguarded Newton, or None."""
    a, b = spec.a, spec.b
    fa, fb = spec.f1(a), spec.f1(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        return None
    lo, hi = a, b
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = spec.f1(x)
        if fx == 0.0:
            return x
        if (fx < 0) == (fa < 0):
            lo = x
        else:
            hi = x
        d = spec.f2(x)
        nx = x - fx / d if d > 0 else 0.5 * (lo + hi)
        if not lo < nx < hi:
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol * max(1.0, abs(x)):
            return nx
        x = nx
    return x


def saddle_point(spec: SaddleSpec):
    """Main term e^(i pi/4) e^(2 pi i f(c)) / sqrt(f''(c)) of the integral of
    e^(2 pi i f) over [a, b], and the sum of the three error terms with unit
    constants: A/V, min(1/|f'(a)|, sqrt(A)), min(1/|f'(b)|, sqrt(A))."""
    spec.validate()

    def end_term(x):
        d = abs(spec.f1(x))
        return math.sqrt(spec.A) if d == 0 else min(1.0 / d, math.sqrt(spec.A))

    ends = end_term(spec.a) + end_term(spec.b)
    c = _stationary(spec)
    if c is None:
        return 0j, ends
    budget = spec.A / spec.V + ends
    main = cmath.exp(1j * math.pi / 4.0) * cmath.exp(2j * math.pi * spec.f(c)) / math.sqrt(spec.f2(c))
    width = spec.b - spec.a
    if abs(c - spec.a) < 1e-9 * width or abs(c - spec.b) < 1e-9 * width:
        main *= 0.5
    return main, budget


def oscillatory_integral(f: Callable, a: float, b: float, panels: int = 2000) -> complex:
    """Integral of exp(2 pi i f(x)) over [a, b] by composite 15-point Kronrod."""
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    xs = mid[:, None] + half[:, None] * NODES[None, :]
    vals = np.exp(2j * np.pi * np.vectorize(f)(xs))
    return complex(np.sum((vals @ W_K) * half))


@dataclass(frozen=True)
class SaddleCase:
    A: float
    V: float
    c: float
    beta: float
    main: complex
    budget: float
    direct: complex

    @property
    def ok(self) -> bool:
        return abs(self.direct - self.main) <= self.budget


def cubic_phase(A: float, V: float, c: float, beta: float, a: float = 0.0) -> SaddleSpec:
    """f(x) = (x-c)^2/(2A) + beta (x-c)^3/(6AV) on [a, a+V]; f'' >= (1-|beta|)/A > 0 for |beta| < 1."""
    return SaddleSpec(
        f=lambda x: (x - c) ** 2 / (2 * A) + beta * (x - c) ** 3 / (6 * A * V),
        f1=lambda x: (x - c) / A + beta * (x - c) ** 2 / (2 * A * V),
        f2=lambda x: 1 / A + beta * (x - c) / (A * V),
        f3=lambda x: beta / (A * V),
        f4=lambda x: 0.0,
        a=a, b=a + V, A=A, V=V,
    )


def saddle_suite(n: int = 50, seed: int = 1) -> list[SaddleCase]:
    """Random phases meeting the lemma's hypotheses, each compared with direct quadrature."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n):
        A = float(np.exp(rng.uniform(0.0, math.log(200.0))))
        V = A * float(rng.uniform(0.5, 4.0))
        c = float(rng.uniform(-0.1, 1.1)) * V  # sometimes just outside [0, V]
        beta = float(rng.uniform(-0.5, 0.5))
        spec = cubic_phase(A, V, c, beta)
        main, budget = saddle_point(spec)
        panels = int(max(2000, 8 * V * V / A))
        direct = oscillatory_integral(spec.f, spec.a, spec.b, panels)
        cases.append(SaddleCase(A, V, c, beta, main, budget, direct))
    return cases


# --- exponential sums -----------------------------------------------------------

@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    N0: int
    N1: int
    terms: int

    @property
    def normalized(self) -> float:
        return abs(self.value) / self.N0 ** (2.0 / 3.0)


def exp_sum_d3(N: int, N1: int, table: DivisorTable) -> ExpSumResult:
    """sum_{N < n <= N1} d_3(n) exp(3 pi i n^(2/3)) with N < N1 <= 2N."""
    if table.k != 3:
        raise DomainError(f"need a d_3 table, got k={table.k}")
    if not 1 <= N < N1 <= 2 * N:
        raise DomainError(f"need 1 <= N < N1 <= 2N, got N={N}, N1={N1}")
    if N1 > table.limit:
        raise ResourceError(f"d_3 table covers {table.limit}, need {N1}", required=N1)
    value = kernels.power_phase_sum(table.as_float(), N + 1, N1, 0.0, 3.0 * math.pi, 0.0)
    return ExpSumResult(value, N, N1, N1 - N)


def dyadic_scan(j0: int, j1: int, table: DivisorTable):
    """[(N, |S(N, 2N)| / N^(2/3))] for N = 2^j, j0 <= j <= j1."""
    return [(2**j, exp_sum_d3(2**j, 2 ** (j + 1), table).normalized) for j in range(j0, j1 + 1)]
