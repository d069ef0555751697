"""Command-line entry point: ``zetamoment <subcommand> ...``."""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .. import cesaro, correlation
from ..errors import ZetaMomentError
from ..integrands import IntegrandSpec
from ..quadrature import DEFAULT_PANEL_TOL
from ..zeta import zeta_derivative
from . import cache as cache_mod
from .config import AsymptoteSource, ExperimentConfig, default_suite_path, load_config
from .experiments import (ExperimentVerdict, measured_value, run_experiment, scan_csv, trace_csv,
                          verify_all, write_scan_csv, write_trace_csv)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _fraction(text: str) -> float:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return float(num) / float(den)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _suite(args):
    return load_config(args.config or default_suite_path())


def _find(args, exp_id) -> ExperimentConfig:
    for cfg in _suite(args):
        if cfg.experiment_id == exp_id:
            return cfg
    raise SystemExit(f"no experiment {exp_id!r} in {args.config or default_suite_path()}")


def _inline_config(args) -> ExperimentConfig:
    spec = IntegrandSpec(kernel=args.kernel, sigma=args.sigma, r=args.r, m=args.m,
                         component=args.component, domain=args.domain)
    if args.asymptote is None:
        source, value = AsymptoteSource.NONE, None
    else:
        source, value = AsymptoteSource.EXPLICIT, args.asymptote
    return ExperimentConfig(experiment_id="inline", integrand=spec, T_max=args.T_max,
                            asymptote_source=source, asymptote_value=value,
                            panel_tol=args.tol or DEFAULT_PANEL_TOL)


def _experiment(args) -> ExperimentConfig:
    if args.experiment:
        cfg = _find(args, args.experiment)
        changes = {}
        if args.T_max is not None:
            changes["T_max"] = args.T_max
        if args.tol:
            changes["panel_tol"] = args.tol
        return cfg.with_(**changes) if changes else cfg
    if args.kernel is None or args.sigma is None or args.r is None or args.T_max is None:
        raise SystemExit("trace needs an experiment id or --kernel, --sigma, --r and --T-max")
    return _inline_config(args)


def _out_path(args, name):
    if not name:
        return None
    return os.path.join(args.out, name) if args.out else name


# subcommands

def cmd_zeta(args):
    s = args.s
    value = complex(zeta_derivative(s, args.m))
    print(f"{value.real:.17g} {value.imag:+.17g}i")
    return 0


def cmd_trace(args):
    cfg = _experiment(args)
    result = run_experiment(cfg, workers=args.workers)
    path = _out_path(args, args.csv or cfg.output_path)
    if path:
        write_trace_csv(result.trace, path)
        print(f"wrote {len(result.trace)} rows to {path}", file=sys.stderr)
    else:
        sys.stdout.write(trace_csv(result.trace))
    print(f"{cfg.experiment_id}: {result.classification}; prediction {result.prediction}; "
          f"measured {measured_value(result):.8g}; {result.verdict.value}", file=sys.stderr)
    return 1 if result.verdict is ExperimentVerdict.MISMATCH else 0


def cmd_verify(args):
    suite = _suite(args)
    if args.tol:
        suite = [c.with_(panel_tol=args.tol) for c in suite]
    if args.only:
        wanted = set(args.only)
        suite = [c for c in suite if c.experiment_id in wanted]
    progress = (lambda row: print(f"  {row.experiment_id}: {row.verdict.value}", file=sys.stderr)
                if args.progress else None)
    summary = verify_all(suite, workers=args.workers, out_dir=args.out, progress=progress)
    print(summary.format())
    return 0 if summary.ok else 1


def cmd_periodicity(args):
    cfg = _experiment(args)
    result = run_experiment(cfg, workers=args.workers)
    pred = result.prediction
    if args.asymptote is not None:
        asym = args.asymptote
    elif pred is not None and pred.value is not None:
        asym = pred.target
    else:
        raise SystemExit("periodicity needs a finite asymptote (oracle or --asymptote)")
    trace = result.trace
    r = cfg.integrand.r
    rho = cesaro.base_period(r)
    print(f"asymptote        {asym:.10g}")
    print(f"rho = 2pi/ln r   {rho:.6f}")
    raw = cesaro.crossing_events(trace, asym)
    print(f"partial-sum crossings (raw)  {len(raw)}")
    for c in raw:
        print(f"  T={c.T:.4f}  dir={c.direction:+d}")
    try:
        est = cesaro.period_estimate(trace, asym, min_gap=rho)
    except ZetaMomentError as exc:
        print(f"period: {exc}")
        return 0
    print(f"period           {est.period:.4f}  ({est.period / rho:.3f} rho)")
    print(f"phase drift      {est.phase_drift:.4g}")
    ratios = np.asarray(est.spacings) / rho
    resid = cesaro.integer_ratio_residuals(est.spacings, rho)
    print("same-direction spacings / rho, distance to nearest integer (abs, relative):")
    for q, e in zip(ratios, resid):
        print(f"  {q:8.4f}  {e:.4f}  {e / max(round(q), 1):.4f}")
    first = raw[0].T if raw else 0.0
    approaches = cesaro.closest_approach(trace, asym)
    minima = cesaro.principal_minima(approaches, est.period, start=first)
    print("principal closest approaches of the Cesaro mean:")
    for a in minima:
        print(f"  T={a.T:.3f}  distance={a.distance:.6g}")
    return 0


def _load_cache(args):
    if not args.cache:
        return None
    return cache_mod.read_cache(args.cache)


def cmd_correlate(args):
    tol = args.tol or correlation.DEFAULT_TOL
    rep = correlation.shifted_correlation(args.sigma, args.component, args.L1, args.seg_len,
                                          args.rho, tol, cache=_load_cache(args))
    for key in ("rho", "e_f", "e_g", "var_f", "var_g", "cov", "cor"):
        print(f"{key:6s} {getattr(rep, key):.12g}")
    return 0


def cmd_rho_scan(args):
    tol = args.tol or correlation.DEFAULT_TOL
    scan = correlation.rho_scan(args.sigma, args.component, args.L1, args.seg_len,
                                args.rho_from, args.rho_to, args.rho_step, tol,
                                cache=_load_cache(args), workers=args.workers,
                                threshold=args.threshold)
    path = _out_path(args, args.csv)
    if path:
        write_scan_csv(scan.reports, path)
        print(f"wrote {len(scan)} rows to {path}", file=sys.stderr)
    else:
        sys.stdout.write(scan_csv(scan.reports))
    for p in scan.peaks:
        print(f"peak rho={p.rho:.4f} cor={p.cor:.4f}", file=sys.stderr)
    return 0


def cmd_cache_warm(args):
    count = args.count
    if count is None:
        if args.t_end is None:
            raise SystemExit("cache warm needs --count or --t-end")
        count = int(math.floor((args.t_end - args.t_start) / args.dt + 1e-9)) + 1
    path = args.path or _out_path(args, f"zeta_sigma{args.sigma:g}.cache")
    before = cache_mod.computed_grids
    grid = cache_mod.cache_warm(args.sigma, args.t_start, args.dt, count, path)
    how = "computed" if cache_mod.computed_grids > before else "loaded"
    print(f"{how} {grid.count} samples sigma={grid.sigma:g} t in [{grid.t_range[0]:g}, "
          f"{grid.t_range[1]:g}] -> {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zetamoment",
                                description="Cesaro-regularised zeta moment experiments.")
    p.add_argument("--config", help="experiment suite file (default: bundled acceptance suite)")
    p.add_argument("--out", help="directory for CSV output")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--tol", type=float, default=None, help="quadrature tolerance override")
    sub = p.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeta", help="evaluate zeta or a derivative at one point")
    z.add_argument("s", type=_complex, help="complex argument, e.g. 0.5+14.134725j")
    z.add_argument("--m", type=int, default=0, choices=(0, 1, 2), help="derivative order")
    z.set_defaults(func=cmd_zeta)

    def experiment_args(sp):
        sp.add_argument("experiment", nargs="?", help="experiment id from the suite")
        sp.add_argument("--kernel")
        sp.add_argument("--sigma", type=_fraction)
        sp.add_argument("--r", type=_fraction)
        sp.add_argument("--m", type=int, default=0)
        sp.add_argument("--component", default="real")
        sp.add_argument("--domain", default="half")
        sp.add_argument("--T-max", dest="T_max", type=float)
        sp.add_argument("--asymptote", type=float, help="explicit asymptote")

    t = sub.add_parser("trace", help="run one experiment and emit its trace CSV")
    experiment_args(t)
    t.add_argument("--csv", help="output file (default: the experiment's output, else stdout)")
    t.set_defaults(func=cmd_trace)

    v = sub.add_parser("verify", help="run the suite and print the verdict table")
    v.add_argument("--only", nargs="+", metavar="ID", help="restrict to these experiment ids")
    v.add_argument("--progress", action="store_true")
    v.set_defaults(func=cmd_verify)

    per = sub.add_parser("periodicity", help="crossings, closest approaches and period")
    experiment_args(per)
    per.set_defaults(func=cmd_periodicity)

    def corr_args(sp):
        sp.add_argument("--sigma", type=_fraction, default=0.5)
        sp.add_argument("--component", default="abs", choices=[c.value for c in
                                                               correlation.SignalComponent])
        sp.add_argument("--L1", type=float, default=0.0)
        sp.add_argument("--seg-len", dest="seg_len", type=float,
                        default=correlation.DEFAULT_SEG_LEN)
        sp.add_argument("--cache", help="zeta cache file for signal sampling")

    c = sub.add_parser("correlate", help="correlation at a single shift rho")
    corr_args(c)
    c.add_argument("--rho", type=float, required=True)
    c.set_defaults(func=cmd_correlate)

    rs = sub.add_parser("rho-scan", help="correlation over a grid of shifts")
    corr_args(rs)
    rs.add_argument("--rho-from", dest="rho_from", type=float, default=120.0)
    rs.add_argument("--rho-to", dest="rho_to", type=float, default=145.0)
    rs.add_argument("--rho-step", dest="rho_step", type=float,
                    default=correlation.DEFAULT_RHO_STEP)
    rs.add_argument("--threshold", type=float, default=correlation.MODERATE_CORRELATION)
    rs.add_argument("--csv", help="output file (default stdout)")
    rs.set_defaults(func=cmd_rho_scan)

    ca = sub.add_parser("cache", help="zeta sample cache")
    ca_sub = ca.add_subparsers(dest="cache_command", required=True)
    w = ca_sub.add_parser("warm", help="compute or load a zeta grid")
    w.add_argument("--sigma", type=_fraction, default=0.5)
    w.add_argument("--t-start", dest="t_start", type=float, default=0.0)
    w.add_argument("--dt", type=float, default=0.05)
    w.add_argument("--count", type=int)
    w.add_argument("--t-end", dest="t_end", type=float, default=380.0)
    w.add_argument("--path", help="cache file (default: <out>/zeta_sigma<sigma>.cache)")
    w.set_defaults(func=cmd_cache_warm)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("--workers must be >= 1", file=sys.stderr)
        return 2
    if args.tol is not None and not args.tol > 0:
        print("--tol must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ZetaMomentError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
