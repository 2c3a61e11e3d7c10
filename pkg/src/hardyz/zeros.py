"""Zeros of Z(t) as sign changes: scanning, refinement, census and gaps."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle, parallel, zkernel
from .errors import DomainError

REFINE_TOL = 1e-9
REFINE_ORDER = 5
POLISH_BELOW = 300.0  # oracle polish where RS truncation could move a root by > 1e-9
WINDOW_GAPS = 100
_GRID_BLOCK = 1 << 18


@dataclass(frozen=True)
class ZeroRecord:
    index: int
    gamma: float
    uncertainty: float


@dataclass(frozen=True, eq=False)
class ZeroTable:
    """Zeros found on [t_lo, t_hi], stored column-wise.

    ``first_index`` is the index given to the first stored zero; it is the
    global index n of gamma_n whenever the scan started below gamma_1.
    """

    gammas: np.ndarray
    uncertainties: np.ndarray
    t_lo: float
    t_hi: float
    first_index: int = 1

    def __len__(self):
        return int(self.gammas.shape[0])

    def __getitem__(self, i) -> ZeroRecord:
        i = range(len(self))[i]
        return ZeroRecord(self.first_index + i, float(self.gammas[i]), float(self.uncertainties[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def records(self) -> list[ZeroRecord]:
        return list(self)

    def count_upto(self, T: float) -> int:
        return int(np.searchsorted(self.gammas, T, side="right"))

    def restrict(self, lo: float, hi: float) -> "ZeroTable":
        i0 = int(np.searchsorted(self.gammas, lo, side="left"))
        i1 = int(np.searchsorted(self.gammas, hi, side="right"))
        return ZeroTable(self.gammas[i0:i1], self.uncertainties[i0:i1], max(lo, self.t_lo),
                         min(hi, self.t_hi), self.first_index + i0)


def default_step(t1: float) -> float:
    return 0.5 / math.log(t1)


def n_rvm(T: float) -> float:
    """Main term (T/2pi) log(T/2pi) - T/2pi of the zero-counting function."""
    T = float(T)
    if not T >= 2.0 * math.pi:
        raise DomainError(f"n_rvm needs T >= 2*pi, got {T}")
    x = T / (2.0 * math.pi)
    return x * math.log(x) - x


def _z(ts, threads=None):
    return zkernel.z_rs_many(ts, REFINE_ORDER, threads)


def _refine(a, b, fa, fb, threads=None):
    """Illinois iteration on many brackets at once; returns (lo, hi) with a sign change."""
    lo, hi, flo, fhi = a.copy(), b.copy(), fa.copy(), fb.copy()
    # (x0, f0) is the retained end, (x1, f1) the latest iterate
    x0, f0, x1, f1 = lo.copy(), flo.copy(), hi.copy(), fhi.copy()
    for it in range(200):
        active = (hi - lo) > 2.0 * REFINE_TOL
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        denom = f1[idx] - f0[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = (x0[idx] * f1[idx] - x1[idx] * f0[idx]) / denom
        mid = 0.5 * (lo[idx] + hi[idx])
        inside = np.isfinite(c) & (c > lo[idx]) & (c < hi[idx])
        if it % 4 == 3:
            inside[:] = False  # periodic bisection bounds the worst case
        c = np.where(inside, c, mid)
        fc = _z(c, threads)[0]
        exact = fc == 0.0
        left = np.sign(fc) == np.sign(flo[idx])
        # shrink the certified bracket
        nlo = np.where(left, c, lo[idx])
        nflo = np.where(left, fc, flo[idx])
        nhi = np.where(left, hi[idx], c)
        nfhi = np.where(left, fhi[idx], fc)
        nlo = np.where(exact, c, nlo)
        nhi = np.where(exact, c, nhi)
        lo[idx], flo[idx], hi[idx], fhi[idx] = nlo, nflo, nhi, nfhi
        # Illinois bookkeeping on the secant pair
        keep_old = np.sign(fc) == np.sign(f1[idx])
        nx0 = np.where(keep_old, x0[idx], x1[idx])
        nf0 = np.where(keep_old, 0.5 * f0[idx], f1[idx])
        x0[idx], f0[idx] = np.where(inside, nx0, lo[idx]), np.where(inside, nf0, flo[idx])
        x1[idx], f1[idx] = np.where(inside, c, hi[idx]), np.where(inside, fc, fhi[idx])
    return lo, hi


def _polish_oracle(g, lo, hi):
    """Secant/bisection on the oracle inside [lo, hi]; returns a tighter bracket."""
    f_lo = float(oracle.z_oracle(lo).value)
    f_hi = float(oracle.z_oracle(hi).value)
    if f_lo == 0.0:
        return lo, lo
    if f_hi == 0.0 or f_lo * f_hi > 0:
        # RS bracket is off by more than its width; widen until the oracle brackets
        width = max(hi - lo, 1e-9)
        while f_lo * f_hi > 0 and width < 1e-3:
            width *= 8.0
            lo, hi = g - width, g + width
            f_lo = float(oracle.z_oracle(lo).value)
            f_hi = float(oracle.z_oracle(hi).value)
    for it in range(100):
        if hi - lo <= 2.0 * REFINE_TOL:
            break
        c = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if it % 3 == 2 or not lo < c < hi:
            c = 0.5 * (lo + hi)
        fc = float(oracle.z_oracle(c).value)
        if fc == 0.0:
            return c, c
        if (fc < 0) == (f_lo < 0):
            lo, f_lo = c, fc
        else:
            hi, f_hi = c, fc
    return lo, hi


def _near_pairs(ts, zs, threads=None):
    """Find zero pairs that fall between two grid points.

    A missed pair shows up as a grid-local minimum of |Z| without a sign
    change.  Such spots are resampled at 1/8 of the grid step, and the vertex
    of the parabola through the finest minimum is tried as well; any sign
    flip yields brackets.  Returns a list of (lo, hi, f_lo, f_hi).
    """
    az = np.abs(zs)
    same = (np.sign(zs[:-2]) == np.sign(zs[1:-1])) & (np.sign(zs[1:-1]) == np.sign(zs[2:]))
    dip = (az[1:-1] < 0.25 * np.minimum(az[:-2], az[2:])) | (az[1:-1] < 5.0 * zkernel.rs_error_bound(ts[1:-1], REFINE_ORDER))
    idx = np.nonzero(dip & same)[0] + 1
    out = []
    if idx.size == 0:
        return out
    frac = np.linspace(0.0, 1.0, 17)
    grid = ts[idx - 1, None] + (ts[idx + 1] - ts[idx - 1])[:, None] * frac[None, :]
    vals = _z(grid.ravel(), threads)[0].reshape(grid.shape)
    vals[:, 0], vals[:, -1] = zs[idx - 1], zs[idx + 1]
    j = np.clip(np.argmin(np.abs(vals), axis=1), 1, frac.size - 2)
    rows = np.arange(idx.size)
    xa, xb, xc = grid[rows, j - 1], grid[rows, j], grid[rows, j + 1]
    fa, fb, fc = vals[rows, j - 1], vals[rows, j], vals[rows, j + 1]
    den = fa - 2.0 * fb + fc
    with np.errstate(divide="ignore", invalid="ignore"):
        v = xb + 0.5 * (xb - xa) * (fa - fc) / den
    v = np.where(np.isfinite(v) & (v > xa) & (v < xc), v, xb)
    fv = _z(v, threads)[0]
    for r in rows:
        xs = np.append(grid[r], v[r])
        fs = np.append(vals[r], fv[r])
        order = np.argsort(xs, kind="stable")
        xs, fs = xs[order], fs[order]
        for k in np.nonzero(np.sign(fs[:-1]) * np.sign(fs[1:]) < 0)[0]:
            out.append((float(xs[k]), float(xs[k + 1]), float(fs[k]), float(fs[k + 1])))
    return out


def _scan_block(args):
    a, b, step, threads = args
    n = max(2, int(math.ceil((b - a) / step)) + 1)
    ts = a + step * np.arange(n, dtype=np.float64)
    ts[-1] = b
    zs = _z(ts, threads)[0]
    flips = np.nonzero(np.sign(zs[:-1]) * np.sign(zs[1:]) < 0)[0]
    brackets = [(ts[i], ts[i + 1], zs[i], zs[i + 1]) for i in flips]
    exact = np.nonzero(zs == 0.0)[0]
    brackets += [(ts[i], ts[i], 0.0, 0.0) for i in exact]
    brackets += _near_pairs(ts, zs, threads)
    return brackets


def _blocks(t0, t1, step):
    span = step * (_GRID_BLOCK - 1)
    edges = [t0]
    while edges[-1] + span < t1:
        edges.append(edges[-1] + span)
    edges.append(t1)
    return list(zip(edges[:-1], edges[1:]))


def _bracket_zeros(t0, t1, step, threads):
    items = [(a, b, step, 1) for a, b in _blocks(t0, t1, step)]
    found = []
    for part in parallel.map_ordered(_scan_block, items, threads):
        found.extend(part)
    return found


def _dedupe(lo, hi):
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    mid = 0.5 * (lo + hi)
    keep = np.ones(mid.shape[0], dtype=bool)
    keep[1:] = np.diff(mid) > 4.0 * REFINE_TOL
    return lo[keep], hi[keep]


def _solve(brackets, threads):
    if not brackets:
        return np.zeros(0), np.zeros(0)
    arr = np.array(brackets, dtype=np.float64)
    lo, hi, flo, fhi = arr.T
    point = lo == hi
    lo_r, hi_r = lo.copy(), hi.copy()
    sel = ~point
    if sel.any():
        lo_r[sel], hi_r[sel] = _refine(lo[sel], hi[sel], flo[sel], fhi[sel], threads)
    for i in np.nonzero(0.5 * (lo_r + hi_r) < POLISH_BELOW)[0]:
        lo_r[i], hi_r[i] = _polish_oracle(0.5 * (lo_r[i] + hi_r[i]), lo_r[i], hi_r[i])
    return _dedupe(lo_r, hi_r)


def _reconcile(t0, t1, gam, step, threads):
    """Rescan windows whose count disagrees with the theta increment."""
    mean_gap = 2.0 * math.pi / math.log(max(t1, 2.0 * math.pi * math.e) / (2.0 * math.pi))
    width = WINDOW_GAPS * mean_gap
    edges = np.append(np.arange(t0, t1, width), t1)
    if edges.shape[0] < 2:
        return gam, []
    th = zkernel.theta_many(edges)
    counts = np.diff(np.searchsorted(gam, edges, side="right"))
    expect = np.diff(th) / math.pi
    flagged = np.nonzero(np.abs(counts - expect) > 2.0)[0]
    extra = []
    for w in flagged:
        extra.extend(_bracket_zeros(float(edges[w]), float(edges[w + 1]), step / 8.0, threads))
    return gam, extra


def scan_zeros(t0: float, t1: float, step: float | None = None, threads=None,
               first_index: int | None = None) -> ZeroTable:
    """Zeros of Z in [t0, t1] by a sign scan, refined to brackets of width <= 2e-9.

    ``step`` defaults to, and may not exceed, 0.5/log(t1).
    """
    t0, t1 = float(t0), float(t1)
    if not 10.0 <= t0 < t1:
        raise DomainError(f"need 10 <= t0 < t1, got t0={t0}, t1={t1}")
    limit = default_step(t1)
    step = limit if step is None else float(step)
    if not 0.0 < step <= limit * (1.0 + 1e-12):
        raise DomainError(f"step {step} too coarse; must be <= 0.5/log(t1) = {limit:.6g}")
    brackets = _bracket_zeros(t0, t1, step, threads)
    lo, hi = _solve(brackets, threads)
    gam = 0.5 * (lo + hi)
    gam, extra = _reconcile(t0, t1, gam, step, threads)
    if extra:
        lo2, hi2 = _solve(extra, threads)
        lo, hi = _dedupe(np.concatenate([lo, lo2]), np.concatenate([hi, hi2]))
    gam = 0.5 * (lo + hi)
    unc = np.maximum(0.5 * (hi - lo), 0.5 * REFINE_TOL)
    keep = (gam >= t0) & (gam <= t1)
    if first_index is None:
        first_index = 1
    return ZeroTable(gam[keep], unc[keep], t0, t1, first_index)


@dataclass(frozen=True)
class GapStats:
    alpha: float
    value: float
    count: int


def _need_two(table):
    if len(table) < 2:
        raise DomainError("need at least two zeros")


def gap_moment(table: ZeroTable, alpha: float) -> GapStats:
    """sum over consecutive stored zeros of (gamma_n - gamma_{n-1})**alpha."""
    _need_two(table)
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    gaps = np.diff(table.gammas)
    value = float(gaps.size) if alpha == 0 else math.fsum(gaps**alpha)
    return GapStats(float(alpha), value, int(gaps.size))


def delta_series(table: ZeroTable) -> np.ndarray:
    """Normalised gaps (gamma_{n+1} - gamma_n) log(gamma_n / 2pi) / 2pi."""
    _need_two(table)
    g = table.gammas
    return np.diff(g) * np.log(g[:-1] / (2.0 * math.pi)) / (2.0 * math.pi)


def alternating_gap_sums(table: ZeroTable):
    """(sum of gamma_{2n} - gamma_{2n-1}, sum of gamma_{2n+1} - gamma_{2n}) by global index."""
    _need_two(table)
    gaps = np.diff(table.gammas)
    # gap i joins indices first_index + i and first_index + i + 1
    upper = table.first_index + 1 + np.arange(gaps.size)
    even = upper % 2 == 0
    return math.fsum(gaps[even]), math.fsum(gaps[~even])


def write_csv(table: ZeroTable, path) -> None:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "gamma", "uncertainty"])
    for i in range(len(table)):
        w.writerow([table.first_index + i, f"{table.gammas[i]:.15g}", f"{table.uncertainties[i]:.15g}"])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def write_sidecar(table: ZeroTable, path, **params) -> None:
    from . import __version__

    meta = {"t_lo": table.t_lo, "t_hi": table.t_hi, "count": len(table),
            "first_index": table.first_index, "version": __version__, **params}
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_csv(path, t_lo=None, t_hi=None) -> ZeroTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    idx = [int(r["index"]) for r in rows]
    g = np.array([float(r["gamma"]) for r in rows])
    u = np.array([float(r["uncertainty"]) for r in rows])
    lo = float(g[0]) if t_lo is None and g.size else t_lo
    hi = float(g[-1]) if t_hi is None and g.size else t_hi
    return ZeroTable(g, u, lo, hi, idx[0] if idx else 1)
