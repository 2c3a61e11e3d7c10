"""Command-line front end: one subcommand per experiment, CSV or JSON output.

Exit status: 0 success, 1 usage error, 2 quadrature not converged (partial
results are still written and flagged), 3 resource error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, arith, moments, oracle, oscint, zeros, zkernel
from .errors import DomainError, ResourceError

SCHEMA = 1
COMMANDS = ("eval", "zeros", "moment", "signdist", "cubic", "shift2", "shift3", "expsum", "gaps", "clt",
            "phasesum", "growth")
CSV_FIELDS = ("quantity", "T", "H", "k", "U", "phi", "value", "err", "meta")

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    threads: int = 1
    out: str | None = None
    format: str = "csv"
    cache_dir: str | None = None


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker threads (env HARDYZ_THREADS)")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache-dir", default=None, help="divisor-table cache (env HARDYZ_CACHE_DIR)")
    common.add_argument("--tol", type=float, default=1e-10, help="relative quadrature tolerance")

    ap = argparse.ArgumentParser(prog="hardyz", description="Numerical experiments with Hardy's Z-function.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="theta(t) and Z(t) at one height")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--order", type=int, default=1, help="Riemann-Siegel correction terms (0..5)")
    p.add_argument("--digits", type=int, default=20, help="oracle digits")

    p = sub.add_parser("zeros", parents=[common], help="zeros of Z on [t0, t1]")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--table", default=None, help="also write index,gamma,uncertainty CSV plus a .json sidecar")

    p = sub.add_parser("moment", parents=[common], help="integral of Z^k or |Z|^k")
    p.add_argument("--T0", type=float, default=0.0)
    p.add_argument("--T1", "--T", dest="T1", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--absolute", action="store_true")

    p = sub.add_parser("signdist", parents=[common], help="sign partition of Z on [T, T+H]")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--H", type=float, required=True)

    p = sub.add_parser("cubic", parents=[common], help="cubic moment on [T, 2T] versus the explicit formula")
    p.add_argument("--T", type=float, required=True)

    p = sub.add_parser("shift2", parents=[common], help="integral of Z(t)Z(t+U) on [0, T], U = alpha/log T")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)

    p = sub.add_parser("shift3", parents=[common], help="integral of Z^2(t)Z(t+U) on [T/2, T] versus the shifted formula")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--U", type=float, required=True)
    p.add_argument("--range", dest="range_choice", default="all",
                   choices=[c.value for c in moments.RangeChoice] + ["all"])

    p = sub.add_parser("expsum", parents=[common], help="sum of d_3(n) e(3/2 n^(2/3)) over (N, N1]")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--N1", type=int, default=None)
    p.add_argument("--j0", type=int, default=None, help="dyadic scan from N = 2^j0")
    p.add_argument("--j1", type=int, default=None)

    p = sub.add_parser("gaps", parents=[common], help="gap moments and normalised gaps on [t0, t1]")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--alpha", type=float, nargs="+", default=[0.0, 1.0, 2.0])
    p.add_argument("--step", type=float, default=None)

    p = sub.add_parser("clt", parents=[common], help="distribution of log|Z| on [T, 2T]")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--m", type=int, default=10000)
    p.add_argument("--seed", type=int, default=1)

    p = sub.add_parser("phasesum", parents=[common], help="sum of zeta over phase points t <= T")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)

    p = sub.add_parser("growth", parents=[common], help="ratios of absolute moments on dyadic [T, 2T]")
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--T", type=float, nargs="+", required=True)
    return ap


def _require(cond, flag, message):
    if not cond:
        raise UsageError(f"{flag}: {message}")


def _validate(cmd, p):
    """Check every precondition before any work starts."""
    tol = p.get("tol")
    _require(tol is None or 0 < tol < 1, "--tol", "must lie in (0, 1)")
    if cmd == "eval":
        _require(math.isfinite(p["t"]), "--t", "must be finite")
        _require(0 <= p["order"] <= zkernel.MAX_RS_ORDER, "--order", f"must be in 0..{zkernel.MAX_RS_ORDER}")
        _require(1 <= p["digits"] <= 50, "--digits", "must be in 1..50")
    elif cmd in ("zeros", "gaps"):
        _require(p["t0"] >= 10, "--t0", "must be >= 10")
        _require(p["t1"] > p["t0"], "--t1", "must exceed --t0")
        if p.get("step") is not None:
            lim = zeros.default_step(p["t1"])
            _require(0 < p["step"] <= lim, "--step", f"must lie in (0, 0.5/log(t1)] = (0, {lim:.6g}]")
        if cmd == "gaps":
            _require(all(a >= 0 for a in p["alpha"]), "--alpha", "must be >= 0")
    elif cmd == "moment":
        _require(p["k"] in (1, 2, 3, 4), "--k", "must be 1, 2, 3 or 4")
        _require(p["T0"] >= 0, "--T0", "must be >= 0")
        _require(p["T1"] > p["T0"], "--T1", "must exceed --T0")
    elif cmd == "signdist":
        _require(p["T"] >= 10, "--T", "must be >= 10")
        _require(p["H"] > 0, "--H", "must be positive")
    elif cmd == "cubic":
        _require(p["T"] >= 10, "--T", "must be >= 10")
    elif cmd == "shift2":
        _require(p["T"] >= 10, "--T", "must be >= 10")
        _require(p["alpha"] > 0, "--alpha", "must be positive")
    elif cmd == "shift3":
        _require(p["T"] >= 20, "--T", "must be >= 20")
        _require(0 < p["U"] <= math.sqrt(p["T"]), "--U", "must lie in (0, T^(1/2)]")
    elif cmd == "expsum":
        if p["j0"] is not None or p["j1"] is not None:
            _require(p["j0"] is not None and p["j1"] is not None, "--j0/--j1", "give both")
            _require(0 <= p["j0"] <= p["j1"] <= 30, "--j0/--j1", "need 0 <= j0 <= j1 <= 30")
        else:
            _require(p["N"] is not None and p["N"] >= 1, "--N", "required, >= 1")
            N1 = p["N1"] if p["N1"] is not None else 2 * p["N"]
            _require(p["N"] < N1 <= 2 * p["N"], "--N1", "must satisfy N < N1 <= 2N")
    elif cmd == "clt":
        _require(p["T"] >= 1e3, "--T", "must be >= 1000")
        _require(p["m"] >= 1000, "--m", "must be >= 1000")
    elif cmd == "phasesum":
        _require(p["T"] >= 10, "--T", "must be >= 10")
        _require(0 <= p["phi"] < math.pi, "--phi", "must lie in [0, pi)")
    elif cmd == "growth":
        _require(all(k in (1, 2, 3, 4) for k in p["k"]), "--k", "each k must be 1, 2, 3 or 4")
        Ts = sorted(p["T"])
        _require(Ts[0] >= 10, "--T", "must be >= 10")
        _require(all(abs(b / a - 2.0) < 1e-9 for a, b in zip(Ts, Ts[1:])), "--T", "values must be dyadic")


def parse_config(argv) -> RunConfig:
    """Parse and validate ``argv``; raises UsageError naming the offending flag."""
    ap = _parser()

    def fail(message):
        raise UsageError(message)

    ap.error = fail
    for action in ap._subparsers._group_actions:
        for sp in action.choices.values():
            sp.error = fail
    try:
        ns = ap.parse_args(list(argv))
    except SystemExit as exc:  # --help / --version
        raise exc
    p = vars(ns).copy()
    cmd = p.pop("command")
    threads = p.pop("threads")
    if threads is None:
        threads = int(os.environ.get("HARDYZ_THREADS", "1") or 1)
    _require(threads >= 1, "--threads", "must be >= 1")
    out = p.pop("out")
    fmt = p.pop("format")
    cache_dir = p.pop("cache_dir") or os.environ.get("HARDYZ_CACHE_DIR") or None
    _validate(cmd, p)
    return RunConfig(cmd, p, threads, out, fmt, cache_dir)


# --- record helpers -----------------------------------------------------------

def _rec(quantity, value, err=None, T=None, H=None, k=None, U=None, phi=None, meta=""):
    return {"quantity": quantity, "T": T, "H": H, "k": k, "U": U, "phi": phi, "value": value, "err": err,
            "meta": meta}


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.15g}"
    return str(x)


def _json_value(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _split_complex(records):
    out = []
    for r in records:
        v = r["value"]
        if isinstance(v, complex):
            out.append({**r, "quantity": r["quantity"] + ".re", "value": v.real})
            out.append({**r, "quantity": r["quantity"] + ".im", "value": v.imag})
        else:
            out.append(r)
    return out


def render_csv(config: RunConfig, records) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA} command={config.command} version={__version__}\n")
    buf.write(",".join(CSV_FIELDS) + "\n")
    for r in _split_complex(records):
        buf.write(",".join(_cell(r[f]) for f in CSV_FIELDS) + "\n")
    return buf.getvalue()


def render_json(config: RunConfig, records, wall_time, status) -> str:
    doc = {
        "schema": SCHEMA,
        "command": config.command,
        "config": {k: v for k, v in config.params.items()},
        "version": __version__,
        "status": status,
        "records": [{k: _json_value(v) for k, v in r.items()} for r in records],
        "wall_time": wall_time,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --- commands -------------------------------------------------------------------

def _table(config, k, N):
    return arith.cached_sieve(k, max(1, N), config.cache_dir)


def _cmd_eval(c, p):
    t = p["t"]
    if abs(t) >= 2:
        th = zkernel.theta(t, 2)
        th_val, th_err = th.theta, th.err
    else:
        th_val, th_err = float(oracle.theta_oracle(t, p["digits"])), 10.0 ** -p["digits"]
    z = zkernel.z_rs(t, p["order"]) if abs(t) >= 10 else oracle.z_oracle(t, p["digits"])
    meta = f"method={z.method.value};theta={th_val:.17g};theta_err={th_err:.3g}"
    return [_rec("Z", float(z.value), z.err, T=t, meta=meta)], True


def _cmd_zeros(c, p):
    tab = zeros.scan_zeros(p["t0"], p["t1"], p["step"], threads=c.threads)
    if p["table"]:
        zeros.write_csv(tab, p["table"])
        zeros.write_sidecar(tab, p["table"] + ".json", step=p["step"] or zeros.default_step(p["t1"]))
    recs = [_rec("zero", g.gamma, g.uncertainty, k=g.index, meta="") for g in tab]
    recs.append(_rec("count", len(tab), T=p["t1"], meta=""))
    if p["t0"] <= 14.0:
        recs.append(_rec("n_rvm", zeros.n_rvm(p["t1"]), 2.0 * math.log(p["t1"]), T=p["t1"], meta="main term"))
    return recs, True


def _cmd_moment(c, p):
    r = moments.f_moment(p["T0"], p["T1"], p["k"], p["absolute"], p["tol"], threads=c.threads)
    name = "abs_moment" if p["absolute"] else "moment"
    return [_rec(name, r.value, r.err, T=p["T1"], H=p["T1"] - p["T0"], k=p["k"], meta=f"T0={p['T0']:.15g}")], r.converged


def _cmd_signdist(c, p):
    sp = moments.sign_partition(p["T"], p["H"], tol=p["tol"], threads=c.threads)
    T, H = p["T"], p["H"]
    recs = [
        _rec("Kplus", sp.Kplus, T=T, H=H), _rec("Kminus", sp.Kminus, T=T, H=H),
        _rec("Iplus", sp.Iplus, sp.err, T=T, H=H), _rec("Iminus", sp.Iminus, sp.err, T=T, H=H),
        _rec("integral", sp.integral, sp.err, T=T, H=H), _rec("abs_integral", sp.abs_integral, sp.err, T=T, H=H),
        _rec("K_sum_minus_H", sp.Kplus + sp.Kminus - H, T=T, H=H),
        _rec("intervals", len(sp.intervals), T=T, H=H),
    ]
    return recs, sp.converged


def _cmd_cubic(c, p):
    T = p["T"]
    n0, n1 = moments.cubic_range(T)
    table = _table(c, 3, n1)
    q = oscint.integrate_zk(T, 2 * T, 3, tol=p["tol"], threads=c.threads)
    rhs = moments.cubic_rhs(T, table)
    resid = q.value - rhs.value
    return [
        _rec("lhs", q.value, q.err, T=T, k=3),
        _rec("rhs", rhs.value, T=T, k=3, meta=f"n={rhs.n_lo}..{rhs.n_hi}"),
        _rec("residual_over_T34", resid / T**0.75, T=T, k=3),
    ], q.converged


def _cmd_shift2(c, p):
    h = moments.hall_shifted(p["T"], p["alpha"], tol=p["tol"], threads=c.threads)
    T, a = p["T"], p["alpha"]
    U = a / math.log(T)
    recs = [_rec("lhs", h.lhs, h.lhs_err, T=T, U=U, meta=f"alpha={a:.15g}")]
    for v in moments.HallVariant:
        recs.append(_rec("main", h.mains[v], T=T, U=U, meta=v.value))
        recs.append(_rec("residual_over_bound", h.residuals[v] / h.bound, T=T, U=U, meta=v.value))
    recs.append(_rec("best_variant", 0.0, T=T, U=U, meta=h.best.value))
    return recs, True


def _cmd_shift3(c, p):
    T, U = p["T"], p["U"]
    choices = list(moments.RangeChoice) if p["range_choice"] == "all" else [moments.RangeChoice(p["range_choice"])]
    need = max(moments.shifted_range(T, ch)[1] for ch in choices)
    table = _table(c, 2, need)
    lhs = moments.shifted_cubic_lhs(T, U, p["tol"], c.threads)
    recs = [_rec("lhs", lhs.value, lhs.err, T=T, U=U)]
    resid = {}
    for ch in choices:
        r = moments.shifted_cubic_rhs(T, U, ch, table)
        resid[ch] = lhs.value - r.value
        recs.append(_rec("rhs", r.value, T=T, U=U, meta=f"{ch.value};n={r.n_lo}..{r.n_hi};empty={r.empty}"))
        recs.append(_rec("residual_over_T34", resid[ch] / T**0.75, T=T, U=U, meta=ch.value))
    return recs, lhs.converged


def _cmd_expsum(c, p):
    if p["j0"] is not None:
        table = _table(c, 3, 2 ** (p["j1"] + 1))
        return [_rec("normalized", v, T=float(N), meta="|S|/N^(2/3)") for N, v in
                oscint.dyadic_scan(p["j0"], p["j1"], table)], True
    N1 = p["N1"] if p["N1"] is not None else 2 * p["N"]
    table = _table(c, 3, N1)
    r = oscint.exp_sum_d3(p["N"], N1, table)
    return [_rec("sum", r.value, T=float(p["N"]), meta=f"N1={N1};terms={r.terms}"),
            _rec("normalized", r.normalized, T=float(p["N"]))], True


def _cmd_gaps(c, p):
    tab = zeros.scan_zeros(p["t0"], p["t1"], p["step"], threads=c.threads)
    recs = []
    for a in p["alpha"]:
        g = zeros.gap_moment(tab, a)
        recs.append(_rec("gap_moment", g.value, T=p["t1"], meta=f"alpha={a:.15g};count={g.count}"))
    d = zeros.delta_series(tab)
    recs.append(_rec("delta_mean", float(np.mean(d)), T=p["t1"]))
    recs.append(_rec("delta_min", float(np.min(d)), T=p["t1"]))
    hist, edges = np.histogram(d, bins=np.linspace(0.0, 4.0, 41))
    for h, e in zip(hist, edges[:-1]):
        recs.append(_rec("delta_hist", int(h), T=p["t1"], meta=f"bin={e:.2f}"))
    return recs, True


def _cmd_clt(c, p):
    s = moments.clt_sample(p["T"], p["m"], p["seed"], c.threads)
    return [_rec("ks", s.ks_stat, T=p["T"], meta=f"m={s.m};seed={s.seed}"),
            _rec("rejected", s.rejected, T=p["T"]),
            _rec("mean", float(np.mean(s.values)), T=p["T"]),
            _rec("std", float(np.std(s.values)), T=p["T"])], True


def _cmd_phasesum(c, p):
    r = moments.phase_point_sum(p["T"], p["phi"], c.threads)
    return [_rec("empirical", r.empirical, T=p["T"], phi=p["phi"], meta=f"count={r.count}"),
            _rec("main", r.main, T=p["T"], phi=p["phi"]),
            _rec("relative_residual", r.relative_residual, T=p["T"], phi=p["phi"]),
            _rec("max_rel_imag", r.max_rel_imag, T=p["T"], phi=p["phi"])], True


def _cmd_growth(c, p):
    rows = moments.growth_diagnostics(p["k"], p["T"], threads=c.threads)
    recs = [_rec("ratio", r.ratio, r.err / (r.T * math.log(r.T) ** (r.k**2 / 4.0)), T=r.T, k=r.k) for r in rows]
    for k in p["k"]:
        recs.append(_rec("band", moments.band([r.ratio for r in rows if r.k == k]), k=k, meta="max/min"))
    return recs, True


_DISPATCH = {name: globals()[f"_cmd_{name}"] for name in COMMANDS}


def run(config: RunConfig, stdout=None) -> int:
    """Execute ``config`` and write its records; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    start = time.perf_counter()
    try:
        records, converged = _DISPATCH[config.command](config, config.params)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status = EXIT_OK if converged else EXIT_NOT_CONVERGED
    if not converged:
        for r in records:
            r["meta"] = (r["meta"] + ";" if r["meta"] else "") + "not_converged"
    wall = time.perf_counter() - start
    text = render_csv(config, records) if config.format == "csv" else render_json(config, records, wall, status)
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8", newline="")
    else:
        stdout.write(text)
    return status


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
