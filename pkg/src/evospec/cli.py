"""Batch command-line front end.

Subcommands: ``simulate`` (model paths to CSV), ``estimate`` (spectral
estimate table), ``test`` (PSR/RS stationarity reports as JSON), ``mc``
(Monte Carlo size/power summaries), ``dpss`` (taper dump plus diagnostics)
and ``tradeoff`` (MSE-curve CSVs). File outputs are written to a temp file
and renamed, so failed runs leave nothing behind.
"""

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, backend
from .estimator import build_grid, default_tapers, estimate_grid, write_estimate_csv
from .simulate import GaussianBump, ModelSpec, TimeSeries, model_catalog, simulate
from .stattest import log_table, mc_study, psr_test, rs_test
from .tapers import TaperSpec, compute_dpss, l1_concentration, save_tapers
from .tradeoff import (bump_width, penalty_curve, penalized_K, tradeoff_curve,
                       write_curve_csv)

__all__ = ["main", "load_csv", "log_diff"]


def load_csv(path) -> TimeSeries:
    """Read a series: one value per line or ``index,value`` rows, optional header."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not any(line.strip() for line in lines):
        raise ValueError(f"{path}: file is empty")
    start = 0
    first = lines[0].strip()
    if first and len(first.split(",")) > 2:
        raise ValueError(f"{path}: line 1: expected 1 or 2 columns, got {len(first.split(','))}")
    if first and not _parses_as_row(first):
        start = 1  # single header line
    for lineno, line in enumerate(lines[start:], start=start + 1):
        cells = line.strip()
        if not cells:
            continue
        parts = cells.split(",")
        cell = parts[-1].strip()
        if len(parts) > 2:
            raise ValueError(f"{path}: line {lineno}: expected 1 or 2 columns, got {len(parts)}")
        try:
            v = float(cell)
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric value {cell!r}") from None
        if not math.isfinite(v):
            raise ValueError(f"{path}: line {lineno}: non-finite value {cell!r}")
        values.append(v)
    if not values:
        raise ValueError(f"{path}: no data rows")
    return TimeSeries(np.array(values), meta=f"loaded from {path}")


def _parses_as_row(line: str) -> bool:
    parts = line.split(",")
    if len(parts) > 2:
        return False
    try:
        float(parts[-1])
        return True
    except ValueError:
        return False


def log_diff(x: TimeSeries) -> TimeSeries:
    """Log first-order difference ln X_t - ln X_{t-1}; requires positive values."""
    v = x.values
    if len(v) < 2:
        raise ValueError("log difference needs at least 2 samples")
    bad = np.nonzero(v <= 0)[0]
    if len(bad):
        raise ValueError(f"log difference requires positive values; index {bad[0]} "
                         f"has {v[bad[0]]!r}")
    return TimeSeries(np.diff(np.log(v)), origin=x.origin + 1,
                      meta=(x.meta + " | log-diff").strip(" |"))


def _atomic_write(path, writer) -> None:
    """Run ``writer(tmp_path)`` then rename onto ``path``."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".evospec-", dir=directory)
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_text_file(path, text) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit_json(payload, output) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if output:
        _atomic_write(output, lambda tmp: _write_text_file(tmp, text))
    else:
        sys.stdout.write(text)


def _default_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("EVOSPEC_SEED")
    return int(env) if env else 0


def _series_from_args(args) -> TimeSeries:
    if bool(args.input) == bool(args.model):
        raise ValueError("exactly one input source is required: --input or --model")
    if args.input:
        x = load_csv(args.input)
    else:
        spec = model_catalog(args.model, modulated=args.modulated,
                            sign=args.envelope_sign)
        x = simulate(spec, args.T, _default_seed(args.seed))
    if getattr(args, "transform", "none") == "logdiff":
        x = log_diff(x)
    return x


def _grid_json(grid, K: int) -> dict:
    return {"I": grid.I, "J": grid.J, "N": grid.N, "K": K,
            "B": grid.spacing, "buffer": grid.buffer}


def _psr_json(report, grid, K):
    return {
        "test": "psr",
        "statistics": {
            "S_T": report.S_T, "S_F": report.S_F, "S_IR": report.S_IR,
            "S_T_over_sigma2": report.S_T / report.sigma2,
            "S_IR_over_sigma2": report.S_IR / report.sigma2,
            "sigma2": report.sigma2,
        },
        "df": {"T": report.df_T, "F": report.df_F, "IR": report.df_IR},
        "thresholds": {"T": report.threshold_T, "IR": report.threshold_IR},
        "alpha": report.alpha,
        "decision": report.decision,
        "um_flag": report.um_flag,
        "grid": _grid_json(grid, K),
    }


def _rs_json(report, grid, K):
    return {
        "test": "rs",
        "statistics": {"t_R": report.t_R},
        "df": {"t_R": report.df},
        "thresholds": {"t_R": report.threshold},
        "alpha": report.alpha,
        "decision": report.decision,
        "grid": _grid_json(grid, K),
    }


def _cmd_simulate(args) -> int:
    if args.model:
        spec = model_catalog(args.model, modulated=args.modulated,
                            a=args.envelope_a, sign=args.envelope_sign)
    else:
        env = (GaussianBump(args.envelope_a, args.envelope_sign)
               if args.modulated else None)
        spec = ModelSpec(ar=_parse_floats(args.ar), ma=_parse_floats(args.ma),
                         noise_sd=args.noise_sd, envelope=env)
    x = simulate(spec, args.T, _default_seed(args.seed))

    def write(tmp):
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write("t,x\n")
            for t, v in enumerate(x.values):
                fh.write(f"{t},{float(v)!r}\n")

    _atomic_write(args.output, write)
    return 0


def _cmd_estimate(args) -> int:
    x = _series_from_args(args)
    grid = build_grid(len(x), args.K, blocks=args.blocks, buffer_frac=args.buffer_frac)
    ts = default_tapers(grid.N, args.K)
    est = estimate_grid(x, grid, ts)
    _atomic_write(args.output, lambda tmp: write_estimate_csv(est, tmp))
    return 0


def _render_text(report: dict) -> str:
    stats = report["statistics"]
    lines = [f"{report['test'].upper()} test (alpha={report['alpha']})"]
    if report["test"] == "psr":
        s2 = stats["sigma2"]
        lines.append(f"  S_T/sigma2  = {stats['S_T'] / s2:.4f}  "
                     f"(df {report['df']['T']}, threshold {report['thresholds']['T']:.4f})")
        lines.append(f"  S_IR/sigma2 = {stats['S_IR'] / s2:.4f}  "
                     f"(df {report['df']['IR']}, threshold {report['thresholds']['IR']:.4f})")
        lines.append(f"  S_F         = {stats['S_F']:.4f}  (descriptive)")
    else:
        lines.append(f"  t_R = {stats['t_R']:.4f}  (df {report['df']['t_R']}, "
                     f"threshold {report['thresholds']['t_R']:.4f})")
    g = report["grid"]
    lines.append(f"  grid: I={g['I']} J={g['J']} N={g['N']} K={g['K']}")
    lines.append(f"  decision: {report['decision']}")
    return "\n".join(lines) + "\n"


def _cmd_test(args) -> int:
    x = _series_from_args(args)
    grid = build_grid(len(x), args.K, blocks=args.blocks, buffer_frac=args.buffer_frac)
    ts = default_tapers(grid.N, args.K)
    table = log_table(estimate_grid(x, grid, ts))
    reports = []
    if args.method in ("psr", "both"):
        reports.append(_psr_json(psr_test(table, args.alpha), grid, args.K))
    if args.method in ("rs", "both"):
        reports.append(_rs_json(rs_test(table, args.alpha), grid, args.K))
    if args.format == "text":
        text = "".join(_render_text(r) for r in reports)
        if args.output:
            _atomic_write(args.output, lambda tmp: _write_text_file(tmp, text))
        else:
            sys.stdout.write(text)
    else:
        _emit_json(reports[0] if len(reports) == 1 else reports, args.output)
    return 0


def _cmd_mc(args) -> int:
    summary = mc_study(args.model, args.M, args.T, alpha=args.alpha,
                       seed=_default_seed(args.seed), modulated=args.modulated,
                       K=args.K, blocks=args.blocks, buffer_frac=args.buffer_frac)
    payload = {
        "model": summary.model,
        "modulated": summary.modulated,
        "M": summary.M,
        "T": summary.T,
        "alpha": summary.alpha,
        "seed": summary.seed,
        "rejections": summary.rejections,
        "empirical_rate": summary.empirical_rate,
        "interval95": {k: list(v) for k, v in summary.interval95.items()},
        "excluded": summary.excluded,
    }
    _emit_json(payload, args.output)
    return 0


def _cmd_dpss(args) -> int:
    W = args.W if args.W is not None else (args.K + 1) * math.pi / args.N
    ts = compute_dpss(TaperSpec(N=args.N, W=W, K=args.K))
    if args.output:
        _atomic_write(args.output, lambda tmp: save_tapers(ts, tmp))
    payload = {
        "N": ts.N, "W": ts.W, "K": ts.K,
        "eigenvalues": [float(v) for v in ts.eigenvalues],
        "widths": [float(v) for v in ts.widths],
        "l1_concentration": l1_concentration(ts),
    }
    _emit_json(payload, args.report)
    return 0


def _cmd_tradeoff(args) -> int:
    b_fy = args.b_fy if args.b_fy is not None else bump_width(args.a)
    if args.N is not None:
        points = penalty_curve(args.N, b_fy, penalty_weight=args.penalty_weight,
                               coupling=args.coupling)
        best = penalized_K(args.N, b_fy, penalty_weight=args.penalty_weight,
                           coupling=args.coupling)
        sys.stdout.write(f"penalized argmin at N={args.N}: K={best.K} "
                         f"(mse18={best.mse18!r}, penalty={best.penalty!r})\n")

        def write(tmp):
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write("K,mse18,mse18_plus_penalty,term1,term2,term3,term4\n")
                for pt in points:
                    cells = [str(pt.K), repr(float(pt.mse18)),
                             repr(float(pt.mse18 + pt.penalty))]
                    cells += [repr(float(t)) for t in pt.terms]
                    fh.write(",".join(cells) + "\n")

        _atomic_write(args.output, write)
        return 0
    Ns = _parse_ns(args.Ns)
    points = tradeoff_curve(Ns, formula=args.formula,
                            b_fy=(b_fy if args.formula == 18 else None),
                            coupling=args.coupling, k_max=args.k_max)
    _atomic_write(args.output, lambda tmp: write_curve_csv(points, tmp))
    return 0


def _parse_floats(text):
    return tuple(float(v) for v in text.split(",")) if text else ()


def _parse_ns(spec: str) -> list:
    """``lo:hi`` doubles from lo to hi; comma lists pass through. Evens bump to odd."""
    if ":" in spec:
        lo, hi = (int(v) for v in spec.split(":", 1))
        vals = []
        n = lo
        while n <= hi:
            vals.append(n)
            n *= 2
    else:
        vals = [int(v) for v in spec.split(",")]
    return [v if v % 2 else v + 1 for v in vals]


def _add_grid_flags(p) -> None:
    p.add_argument("--K", type=int, default=5, help="taper count (default 5)")
    p.add_argument("--blocks", type=int, default=None,
                   help="override the block count I (default max(2, floor(log2 T)))")
    p.add_argument("--buffer-frac", type=float, default=0.7,
                   help="frequency buffer as a fraction of the spacing B (default 0.7)")


def _add_source_flags(p, with_transform=True) -> None:
    p.add_argument("--input", help="CSV series input (one value per line or index,value)")
    p.add_argument("--model", choices=list("abcdefgh"), help="catalog model id")
    p.add_argument("--T", type=int, default=512, help="series length for --model (default 512)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: EVOSPEC_SEED env var, else 0)")
    p.add_argument("--modulated", action="store_true",
                   help="apply the Gaussian-bump envelope to catalog models")
    p.add_argument("--envelope-sign", type=int, choices=(-1, 1), default=1,
                   help="sign of the bump exponent (default +1)")
    if with_transform:
        p.add_argument("--transform", choices=("none", "logdiff"), default="none",
                       help="pre-transform applied to the series")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evospec",
        description="Evolutionary spectral estimation and stationarity testing",
    )
    parser.add_argument("--version", action="version",
                        version=f"evospec {__version__} ({backend.backend_name} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a model path to CSV")
    p.add_argument("--model", choices=list("abcdefgh"))
    p.add_argument("--ar", default="", help="comma-separated AR coefficients for a custom model")
    p.add_argument("--ma", default="", help="comma-separated MA coefficients for a custom model")
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--modulated", action="store_true")
    p.add_argument("--envelope-a", type=float, default=200.0)
    p.add_argument("--envelope-sign", type=int, choices=(-1, 1), default=1)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="emit the spectral estimate table as CSV")
    _add_source_flags(p)
    _add_grid_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("test", help="run the stationarity tests, emit JSON reports")
    _add_source_flags(p)
    _add_grid_flags(p)
    p.add_argument("--method", choices=("psr", "rs", "both"), default="both")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("mc", help="Monte Carlo size/power study for a catalog model")
    p.add_argument("--model", choices=list("abcdefgh"), required=True)
    p.add_argument("--M", type=int, default=1000)
    p.add_argument("--T", type=int, default=512)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--modulated", action="store_true",
                   help="power-study variant (size study when omitted)")
    _add_grid_flags(p)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("dpss", help="compute tapers; dump cache CSV and diagnostics")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--W", type=float, default=None,
                   help="angular half-bandwidth (default (K+1)*pi/N)")
    p.add_argument("--output", default=None, help="taper cache CSV path")
    p.add_argument("--report", default=None, help="diagnostics JSON path (default stdout)")
    p.set_defaults(func=_cmd_dpss)

    p = sub.add_parser("tradeoff", help="MSE tradeoff curves (plot data)")
    p.add_argument("--a", type=float, default=200.0,
                   help="bump scale; sets B_FY = a*sqrt(pi/2) (default 200)")
    p.add_argument("--b-fy", type=float, default=None, help="characteristic width override")
    p.add_argument("--Ns", default="64:4096",
                   help="N sweep, 'lo:hi' (doubling) or comma list; evens bump to odd")
    p.add_argument("--formula", type=int, choices=(18, 19), default=18)
    p.add_argument("--N", type=int, default=None,
                   help="fixed-N mode: emit the per-K penalty curve instead of an N sweep")
    p.add_argument("--penalty-weight", type=float, default=1.0)
    p.add_argument("--coupling", choices=("k", "k+1"), default="k")
    p.add_argument("--k-max", type=int, default=None,
                   help="cap the exhaustive K search; the full formula-18 scan "
                        "is expensive for N in the thousands")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_tradeoff)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
