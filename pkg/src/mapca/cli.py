"""Command-line interface.

Exit codes: 0 completed (a NotInvariant verdict is a result, not a failure),
1 input error, 2 numeric error, 3 verdict differs from ``--expect``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import data as data_mod
from .errors import InputError, MapcaError, NumericError
from .invariance import Rescaling, Verdict, verify_invariance
from .metrics import MetricSpec, build_metric
from .solver import beta_sweep, solve_mapca
from .spectra import decompose, symmetric
from .ssl import correspondence_table

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_EXPECT = 3

DEFAULT_BETAS = "0,0.25,0.5,0.75,1"
DEFAULT_BALL_METRICS = "identity,diagonal,beta:0.5,beta:0.75,beta:1"
SIG_DIGITS = 12
BALL_TOL = 1e-9


def _clean(obj):
    """Round floats to 12 significant digits; map inf/nan to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG_DIGITS}g}")
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _fmt(x, digits):
    x = float(x)
    if math.isinf(x):
        return "inf"
    return f"{x:.{digits}f}"


def _parse_floats(text, what):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse {what} {text!r} as a comma-separated list of numbers") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise InputError(f"{what} must be a non-empty list of finite numbers, got {text!r}")
    return vals


def _split_metrics(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _load(args):
    dataset = data_mod.load_csv(
        args.input,
        has_header=not args.no_header,
        delimiter=args.delimiter,
        label_column=args.label_column,
    )
    est = data_mod.center_and_covariance(dataset, ddof=args.ddof)
    return dataset, est


def _emit(args, payload, text, csv_rows=None, default="text"):
    fmt = args.format
    if fmt is None and args.output:
        suffix = Path(args.output).suffix.lower()
        fmt = {".csv": "csv", ".txt": "text"}.get(suffix, "json")
    elif fmt is None:
        fmt = default
    if fmt == "json":
        body = dumps(payload)
    elif fmt == "csv":
        if csv_rows is None:
            raise InputError("this command has no CSV output; use --format json or text")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        body = buf.getvalue()
    else:
        body = text
    if args.output:
        Path(args.output).write_text(body, encoding="utf-8")
        if fmt != "text":
            sys.stdout.write(text)
    else:
        sys.stdout.write(body)


def _metric_from_arg(text, args):
    return MetricSpec.parse(text, delimiter=args.delimiter)


def cmd_analyze(args):
    dataset, est = _load(args)
    spec = _metric_from_arg(args.metric, args)
    sol = solve_mapca(est.sigma, spec)
    warnings = list(sol.metric.warnings)
    if sol.degenerate.any():
        idx = [int(i) + 1 for i in np.nonzero(sol.degenerate)[0]]
        warnings.append(f"components {idx} are degenerate; their loadings are not identifiable")
    report = {
        "input": str(args.input),
        "n": dataset.rows,
        "p": dataset.cols,
        "columns": list(dataset.column_names),
        "denominator": est.denominator,
        "metric": str(spec),
        "eigenvalues": sol.eigenvalues,
        "loadings": sol.loadings,
        "condition_number": sol.condition_number,
        "variance_explained": sol.variance_explained,
        "degenerate": sol.degenerate,
        "warnings": warnings,
    }
    lines = [f"metric: {spec}", f"kappa: {_fmt(sol.condition_number, 2)}"]
    for i, (lam, ve) in enumerate(zip(sol.eigenvalues, sol.variance_explained)):
        w = ", ".join(f"{x:.4f}" for x in sol.loadings[:, i])
        lines.append(f"  PC{i + 1}: lambda={lam:.3f}  share={ve:.3f}  w=({w})")
    lines.extend(f"warning: {w}" for w in warnings)
    _emit(args, report, "\n".join(lines) + "\n", default="json")
    return EXIT_OK


def cmd_sweep(args):
    dataset, est = _load(args)
    betas = _parse_floats(args.betas, "betas")
    rows = beta_sweep(est.sigma, betas)
    p = dataset.cols
    warnings = [f"beta={b:g} lies outside [0, 1]" for b in betas if not 0 <= b <= 1]
    payload = {
        "input": str(args.input),
        "rows": [{"beta": r.beta, "kappa": r.kappa, "eigenvalues": r.eigenvalues} for r in rows],
        "warnings": warnings,
    }
    header = ["beta", "kappa"] + [f"lambda_{i + 1}" for i in range(p)]
    table = [header] + [[r.beta, r.kappa, *r.eigenvalues.tolist()] for r in rows]
    table = [table[0]] + [[_clean(x) for x in row] for row in table[1:]]
    lines = [f"{'beta':>6}  {'kappa':>10}"]
    lines += [f"{r.beta:6.2f}  {_fmt(r.kappa, 2):>10}" for r in rows]
    lines += [f"warning: {w}" for w in warnings]
    _emit(args, payload, "\n".join(lines) + "\n", csv_rows=table)
    return EXIT_OK


def cmd_verify_invariance(args):
    expect = Verdict.parse(args.expect) if args.expect is not None else None
    dataset, est = _load(args)
    scales = _parse_floats(args.scales, "scales")
    if len(scales) != dataset.cols:
        raise InputError(f"{len(scales)} scales given for {dataset.cols} columns")
    spec = _metric_from_arg(args.metric, args)
    report = verify_invariance(est.sigma, spec, Rescaling(np.array(scales)))
    payload = report.to_dict()
    payload["input"] = str(args.input)
    ratio = ", ".join(f"{x:.3f}" for x in report.pc1_ratio)
    lines = [
        f"verdict: {report.verdict}",
        f"metric: {spec}",
        f"lambda_1: {report.eigenvalues[0]:.3f} -> {report.rescaled_eigenvalues[0]:.3f}",
        f"eigenvalue_dev: {report.eigenvalue_dev:.3e}",
        f"loading_dev: {report.loading_dev:.3e}",
        f"condition M~ = CMC: {'holds' if report.condition_holds else 'fails'} "
        f"(residual {report.condition_residual:.3e})",
        f"PC1 ratio: ({ratio})",
    ]
    if report.skipped_components:
        lines.append(f"skipped degenerate components: {[i + 1 for i in report.skipped_components]}")
    _emit(args, payload, "\n".join(lines) + "\n")
    if expect is not None and expect != report.verdict:
        sys.stderr.write(f"expected verdict {expect}, got {report.verdict}\n")
        return EXIT_EXPECT
    return EXIT_OK


def cmd_ssl_table(args):
    _, est = _load(args)
    rows = correspondence_table(est.sigma)
    payload = {"input": str(args.input), "rows": [r.to_dict() for r in rows]}
    table = [["method", "metric", "beta", "kappa", "behaviour"]]
    table += [[r.method.label, str(r.metric), "" if r.beta is None else _clean(r.beta),
               _clean(r.kappa), r.behaviour] for r in rows]
    lines = [f"{'method':<20} {'metric':<10} {'beta':>5} {'kappa':>10}  behaviour"]
    for r in rows:
        beta = "---" if r.beta is None else f"{r.beta:g}"
        lines.append(f"{r.method.label:<20} {str(r.metric):<10} {beta:>5} {_fmt(r.kappa, 2):>10}  {r.behaviour}")
    _emit(args, payload, "\n".join(lines) + "\n", csv_rows=table)
    return EXIT_OK


def ball_geometry(sigma2, spec, n_points):
    """Unit ball ``{w : w^T M w = 1}`` and scaled PC directions for a 2x2 covariance."""
    metric = build_metric(sigma2, spec)
    sol = solve_mapca(sigma2, metric)
    theta = 2.0 * math.pi * np.arange(n_points) / n_points
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    pts = circle @ metric.inverse_sqrt
    quad = np.einsum("ij,jk,ik->i", pts, metric.m, pts)
    worst = float(np.max(np.abs(quad - 1.0)))
    if worst > BALL_TOL:
        raise NumericError(f"ball points miss w^T M w = 1 by {worst:.3e}")
    dirs = []
    for i in range(2):
        w = sol.loadings[:, i]
        dirs.append(w / np.linalg.norm(w) * math.sqrt(max(float(sol.eigenvalues[i]), 0.0)))
    cov = decompose(sigma2)
    root = (cov.eigenvectors * np.sqrt(np.clip(cov.eigenvalues, 0.0, None))) @ cov.eigenvectors.T
    cov_ellipse = circle @ root
    return {
        "metric": str(metric.spec),
        "metric_matrix": metric.m,
        "kappa": sol.condition_number,
        "eigenvalues": sol.eigenvalues,
        "pc_directions": dirs,
        "theta": theta,
        "points": pts,
        "max_quadratic_error": worst,
        "covariance_ellipse": cov_ellipse,
    }


def cmd_ball(args):
    dataset, est = _load(args)
    if dataset.cols < 2:
        raise InputError("ball needs at least 2 columns")
    try:
        dims = [int(t) for t in args.dims.split(",")]
    except ValueError:
        raise InputError(f"--dims must be two integers, got {args.dims!r}") from None
    if len(dims) != 2 or dims[0] == dims[1] or not all(0 <= d < dataset.cols for d in dims):
        raise InputError(f"--dims must name two distinct columns in [0, {dataset.cols - 1}]")
    if args.points < 8:
        raise InputError("--points must be at least 8")
    sigma2 = symmetric(est.sigma[np.ix_(dims, dims)])
    panels = [ball_geometry(sigma2, _metric_from_arg(m, args), args.points)
              for m in _split_metrics(args.metrics)]
    payload = {
        "input": str(args.input),
        "dims": dims,
        "columns": [dataset.column_names[d] for d in dims],
        "covariance": sigma2,
        "panels": panels,
    }
    table = [["metric", "theta", "x", "y"]]
    for panel in panels:
        for t, (x, y) in zip(panel["theta"], panel["points"]):
            table.append([panel["metric"], _clean(t), _clean(x), _clean(y)])
    lines = [f"{'metric':<12} {'kappa':>8}  PC directions"]
    for panel in panels:
        d = "  ".join(f"({v[0]:.3f}, {v[1]:.3f})" for v in panel["pc_directions"])
        lines.append(f"{panel['metric']:<12} {_fmt(panel['kappa'], 2):>8}  {d}")
    _emit(args, payload, "\n".join(lines) + "\n", csv_rows=table, default="csv")
    return EXIT_OK


def _common(p):
    p.add_argument("--input", required=True, help="CSV data file")
    p.add_argument("--output", help="output file; format follows the suffix (.json, .csv, .txt)")
    p.add_argument("--format", choices=("json", "csv", "text"), help="override the output format")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true", help="first row is data")
    p.add_argument("--label-column", type=int, default=None, help="0-based index of a label column to drop")
    p.add_argument("--ddof", type=int, default=1, choices=(0, 1),
                   help="covariance denominator n - ddof (default 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="mapca", description="Metric-aware PCA")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="solve under one metric")
    _common(p)
    p.add_argument("--metric", default="identity")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="condition number along the beta family")
    _common(p)
    p.add_argument("--betas", default=DEFAULT_BETAS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-invariance", help="rescale columns and compare solutions")
    _common(p)
    p.add_argument("--scales", required=True, help="comma-separated positive factors, one per column")
    p.add_argument("--metric", default="diagonal")
    p.add_argument("--expect", help="exit 3 unless the verdict matches")
    p.set_defaults(func=cmd_verify_invariance)

    p = sub.add_parser("ssl-table", help="SSL method / metric correspondence")
    _common(p)
    p.set_defaults(func=cmd_ssl_table)

    p = sub.add_parser("ball", help="metric unit balls for plotting")
    _common(p)
    p.add_argument("--dims", default="0,1", help="two 0-based column indices")
    p.add_argument("--points", type=int, default=256)
    p.add_argument("--metrics", default=DEFAULT_BALL_METRICS)
    p.set_defaults(func=cmd_ball)
    return parser


def _fail(exc, code):
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        return _fail(exc, EXIT_NUMERIC)
    except (InputError, MapcaError, OSError, ValueError) as exc:
        return _fail(exc, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
