"""Command-line interface.

Subcommands::

    epci curve     exceedance point estimates and bands over a cutoff grid
    epci ci        parameter confidence interval and p-value at a cutoff
    epci coverage  Monte Carlo coverage simulation
    epci plot      SVG figure of the curve with its band

Input is either a CSV file (``y`` column alone for the sample mean;
``y,x1,...,xk`` for regression) or inline summary statistics
(``--theta --sigma --n``).  Numeric output is written with 9 significant
digits (round-half-even), so identical invocations produce identical bytes.

Exit codes: 0 success, 2 malformed input, 3 degenerate fit (zero residual
scale or n <= d), 4 numeric failure.  Errors are written to stderr with an
``EP-ERR:<code>:`` prefix.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import (
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    NumericError,
    ValidationError,
)
from .exceedance import (
    EpCurve,
    ExceedanceQuery,
    Side,
    default_cutoff_grid,
    ep_curve,
    p_value,
    parameter_ci,
    point_estimate,
)
from .models import Dataset, FitSummary, fit_linear_regression, fit_sample_mean, summary_from_stats
from .simulation import (
    DEFAULT_MEAN_CUTOFFS,
    DEFAULT_REGRESSION_CUTOFFS,
    DEFAULT_REPLICATIONS,
    DEFAULT_SAMPLE_SIZES,
    CoverageConfig,
    run_coverage,
)
from .svg import render_ep_curve_svg

DEFAULT_SEED = 1729

_SIDES = [s.value for s in Side]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"EP-ERR:2: {message}", file=sys.stderr)
        raise SystemExit(2)


def _fmt9(v: float) -> str:
    return format(float(v), ".9g")


def _json_num(v: float) -> float:
    return float(_fmt9(v))


def _fail(code: int, message: str) -> int:
    print(f"EP-ERR:{code}: {message}", file=sys.stderr)
    return code


def _write_text(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read_dataset(path: str) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValidationError(f"input file {path!r} is empty")
    header = [h.strip() for h in rows[0]]
    expected = ["y"] + [f"x{i}" for i in range(1, len(header))]
    if header != expected:
        raise ValidationError(
            f"input header must be {','.join(expected)!r} style (got {','.join(header)!r})"
        )
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            body.append([float(v) for v in row])
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
    if not body:
        raise ValidationError(f"input file {path!r} has a header but no data rows")
    data = np.asarray(body)
    covariates = data[:, 1:] if data.shape[1] > 1 else None
    return Dataset(outcome=data[:, 0], covariates=covariates)


def _load_fit(args) -> FitSummary:
    summary_given = args.theta is not None or args.sigma is not None or args.n is not None
    if args.input is not None and summary_given:
        raise ValidationError("give either --input or summary flags, not both")
    if args.input is not None:
        data = _read_dataset(args.input)
        if data.covariates is None:
            return fit_sample_mean(data)
        return fit_linear_regression(data)
    if not summary_given:
        raise ValidationError("no input: pass --input FILE or --theta/--sigma/--n")
    if args.theta is None or args.sigma is None or args.n is None:
        raise ValidationError("summary input needs all of --theta, --sigma and --n")
    return summary_from_stats(args.theta, args.sigma, args.n, args.d)


def _parse_cutoff_spec(spec: str) -> tuple[float, ...]:
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ValueError("range form is lo:hi:count")
            lo, hi = float(parts[0]), float(parts[1])
            count = int(parts[2])
            if count < 1:
                raise ValueError("count must be at least 1")
            if count == 1:
                return (lo,)
            if hi <= lo:
                raise ValueError("range needs hi > lo")
            step = (hi - lo) / (count - 1)
            return tuple(lo + i * step for i in range(count))
        return tuple(float(v) for v in spec.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad cutoff spec {spec!r}: {exc}") from exc


def _resolve_curve(args) -> EpCurve:
    fit = _load_fit(args)
    m = args.m if args.m is not None else fit.n
    if args.cutoff is None:
        cutoffs = default_cutoff_grid(fit, coefficient=args.coefficient)
    else:
        cutoffs = _parse_cutoff_spec(args.cutoff)
    return ep_curve(
        fit, cutoffs, rep_size=m, alpha=args.alpha, side=args.side, coefficient=args.coefficient
    )


def _curve_csv(curve: EpCurve) -> str:
    lines = ["cutoff,point,lower,upper"]
    for c, e in zip(curve.cutoffs, curve.estimates):
        lines.append(f"{_fmt9(c)},{_fmt9(e.point)},{_fmt9(e.lower)},{_fmt9(e.upper)}")
    return "\n".join(lines) + "\n"


def _curve_json(curve: EpCurve) -> str:
    payload = {
        "alpha": _json_num(curve.alpha),
        "m": curve.rep_size,
        "n": curve.fit.n,
        "d": curve.fit.d,
        "side": curve.side.value,
        "coefficient": curve.coefficient,
        "records": [
            {
                "cutoff": _json_num(c),
                "point": _json_num(e.point),
                "lower": _json_num(e.lower),
                "upper": _json_num(e.upper),
            }
            for c, e in zip(curve.cutoffs, curve.estimates)
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _cmd_curve(args) -> int:
    curve = _resolve_curve(args)
    text = _curve_csv(curve) if args.format == "csv" else _curve_json(curve)
    _write_text(text, args.out)
    return 0


def _cmd_ci(args) -> int:
    fit = _load_fit(args)
    m = args.m if args.m is not None else fit.n
    lo, hi = parameter_ci(fit, args.coefficient, args.alpha, args.side)
    pv = p_value(fit, args.coefficient, args.cutoff, args.side)
    query = ExceedanceQuery(
        cutoff=args.cutoff,
        rep_size=m,
        alpha=args.alpha,
        side=args.side,
        coefficient=args.coefficient,
    )
    point = point_estimate(fit, query)
    theta = fit.theta_hat[args.coefficient - 1]
    if args.format == "csv":
        header = "theta_hat,ci_lower,ci_upper,p_value,ep_point,cutoff,alpha,side,n,d"
        row = ",".join(
            [
                _fmt9(theta),
                _fmt9(lo),
                _fmt9(hi),
                _fmt9(pv),
                _fmt9(point),
                _fmt9(args.cutoff),
                _fmt9(args.alpha),
                args.side,
                str(fit.n),
                str(fit.d),
            ]
        )
        text = header + "\n" + row + "\n"
    else:
        text = (
            json.dumps(
                {
                    "theta_hat": _json_num(theta),
                    "ci_lower": _json_num(lo),
                    "ci_upper": _json_num(hi),
                    "p_value": _json_num(pv),
                    "ep_point": _json_num(point),
                    "cutoff": _json_num(args.cutoff),
                    "alpha": _json_num(args.alpha),
                    "side": args.side,
                    "n": fit.n,
                    "d": fit.d,
                },
                indent=2,
            )
            + "\n"
        )
    _write_text(text, args.out)
    return 0


def _coverage_csv(result) -> str:
    lines = ["scenario,n,cutoff,coverage,mc_se,K"]
    for c in result.cells:
        lines.append(
            f"{c.scenario},{c.n},{_fmt9(c.cutoff)},{_fmt9(c.coverage)},"
            f"{_fmt9(c.mc_se)},{c.replications}"
        )
    return "\n".join(lines) + "\n"


def _coverage_json(result) -> str:
    payload = {
        "scenario": result.scenario,
        "alpha": _json_num(result.alpha),
        "master_seed": result.master_seed,
        "rep_size_rule": result.rep_size_rule,
        "cells": [
            {
                "n": c.n,
                "cutoff": _json_num(c.cutoff),
                "coverage": _json_num(c.coverage),
                "mc_se": _json_num(c.mc_se),
                "K": c.replications,
                "true_ep": _json_num(c.true_ep),
            }
            for c in result.cells
        ],
        "design_info": [
            {"n": n, "gram_slope": _json_num(g)} for n, g in result.design_info
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _cmd_coverage(args) -> int:
    scenario = {"mean": "sample_mean", "regression": "linear_regression"}[args.scenario]
    if args.n_grid is None:
        sizes = DEFAULT_SAMPLE_SIZES
    else:
        try:
            sizes = tuple(int(v) for v in args.n_grid.split(","))
        except ValueError as exc:
            raise ValidationError(f"bad n grid {args.n_grid!r}: {exc}") from exc
    if args.cutoff is None:
        cutoffs = DEFAULT_MEAN_CUTOFFS if scenario == "sample_mean" else DEFAULT_REGRESSION_CUTOFFS
    else:
        cutoffs = _parse_cutoff_spec(args.cutoff)
    config = CoverageConfig(
        scenario=scenario,
        sample_sizes=sizes,
        cutoffs=cutoffs,
        replications=args.replications,
        alpha=args.alpha,
        master_seed=args.seed,
    )
    result = run_coverage(config, jobs=args.jobs)
    text = _coverage_csv(result) if args.format == "csv" else _coverage_json(result)
    _write_text(text, args.out)
    return 0


def _cmd_plot(args) -> int:
    curve = _resolve_curve(args)
    svg = render_ep_curve_svg(
        curve,
        width=args.width,
        height=args.height,
        show_parameter_ci=not args.no_parameter_ci,
    )
    _write_text(svg, args.out)
    return 0


def _add_fit_arguments(sub) -> None:
    sub.add_argument("--input", metavar="CSV", help="data file with header y[,x1,...,xk]")
    sub.add_argument("--theta", type=float, help="summary coefficient estimate")
    sub.add_argument("--sigma", type=float, help="summary marginal scale (SE * sqrt(n))")
    sub.add_argument("--n", type=int, help="summary sample size")
    sub.add_argument("--d", type=int, default=1, help="summary parameter count (default 1)")
    sub.add_argument("--coefficient", type=int, default=1, help="1-based coefficient index")
    sub.add_argument("--alpha", type=float, default=0.05, help="1 - confidence level")
    sub.add_argument("--m", type=int, default=None, help="replication size (default: n)")
    sub.add_argument("--side", choices=_SIDES, default=Side.TWO_SIDED.value)


def _add_output_arguments(sub, formats=("csv", "json")) -> None:
    if formats:
        sub.add_argument("--format", choices=formats, default=formats[0])
    sub.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    sub.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help="master seed (used by coverage)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epci", description="exceedance probability intervals")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="EP point estimates and bands over cutoffs")
    _add_fit_arguments(curve)
    curve.add_argument(
        "--cutoff",
        help='cutoffs: single value, comma list "c1,c2,...", or range "lo:hi:count" '
        "(default: 201 points over theta_hat +/- 4 SE; write --cutoff=-1:1:5 "
        "when the spec starts with a minus sign)",
    )
    _add_output_arguments(curve)
    curve.set_defaults(func=_cmd_curve)

    ci = sub.add_parser("ci", help="parameter CI and p-value at a cutoff")
    _add_fit_arguments(ci)
    ci.add_argument("--cutoff", type=float, default=0.0, help="null value for the p-value")
    _add_output_arguments(ci)
    ci.set_defaults(func=_cmd_ci)

    coverage = sub.add_parser("coverage", help="Monte Carlo coverage simulation")
    coverage.add_argument("--scenario", choices=["mean", "regression"], default="mean")
    coverage.add_argument("--n-grid", help='sample sizes "n1,n2,..." (default 20,40,60,80,100)')
    coverage.add_argument("--cutoff", help="cutoff spec (defaults to the scenario grid)")
    coverage.add_argument(
        "--replications", type=int, default=DEFAULT_REPLICATIONS, help="datasets per cell"
    )
    coverage.add_argument("--alpha", type=float, default=0.05)
    coverage.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_output_arguments(coverage)
    coverage.set_defaults(func=_cmd_coverage)

    plot = sub.add_parser("plot", help="render the EP curve as SVG")
    _add_fit_arguments(plot)
    plot.add_argument("--cutoff", help="cutoff spec (default grid as for curve)")
    plot.add_argument("--width", type=float, default=720.0)
    plot.add_argument("--height", type=float, default=480.0)
    plot.add_argument("--no-parameter-ci", action="store_true", help="hide the error bar")
    _add_output_arguments(plot, formats=())
    plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InsufficientDataError, DegenerateFitError) as exc:
        return _fail(3, str(exc))
    except (ValidationError, DomainError) as exc:
        return _fail(2, str(exc))
    except OSError as exc:
        return _fail(2, str(exc))
    except NumericError as exc:
        return _fail(4, str(exc))


if __name__ == "__main__":
    sys.exit(main())
