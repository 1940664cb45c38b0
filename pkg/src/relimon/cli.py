"""Command-line front end.

Exit codes: 0 in control (or success), 1 error, 2 out of control.
Solver settings resolve as command line > RELIMON_* environment > defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .failure_data import FailureSeries, group_by_order, musa_fixture, parse_failure_data, serialize_failure_data
from .go_model import GoParams, OrderedGoModel
from .mle import FitResult, SolverConfig, fit
from .simulate import SimConfig, horizon_for_expected, simulate_nhpp
from .spc import (
    M_SCALES,
    OUT_OF_CONTROL,
    build_chart,
    chart_to_csv,
    chart_to_dict,
    control_limits,
    detect,
)
from .svg import render_chart_svg

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_OUT_OF_CONTROL = 2

ENV_BRACKET_LO = "RELIMON_BRACKET_LO"
ENV_BRACKET_HI = "RELIMON_BRACKET_HI"
ENV_TOL = "RELIMON_TOL"


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be finite and > 0, got {text}")
    return value


def _env_float(name: str) -> float | None:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return _positive_float(raw)
    except argparse.ArgumentTypeError as exc:
        raise CliError(f"{name}: {exc}") from None


def solver_config(args) -> SolverConfig:
    def pick(flag, env):
        return flag if flag is not None else _env_float(env)

    kw = {
        "bracket_lo": pick(args.bracket_lo, ENV_BRACKET_LO),
        "bracket_hi": pick(args.bracket_hi, ENV_BRACKET_HI),
        "tol_score": pick(args.tol, ENV_TOL),
        "max_iter": args.max_iter,
    }
    return SolverConfig(**{k: v for k, v in kw.items() if v is not None})


def load_series(args) -> FailureSeries:
    source = args.input
    if source == "musa":
        return musa_fixture()
    fmt = args.format
    if source == "-":
        text = sys.stdin.read()
        fmt = fmt or "plain"
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise CliError(f"cannot read {source}: {exc.strerror}") from None
        fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "plain")
    return parse_failure_data(text, fmt, source_label=source)


def _given_params(args) -> GoParams | None:
    if (args.a is None) != (args.b is None):
        raise CliError("--a and --b must be given together")
    if args.a is None:
        return None
    return GoParams(args.a, args.b)


def run_pipeline(args):
    """Load, group, fit (unless --a/--b given) and chart; shared by all analysis commands."""
    series = load_series(args)
    grouped = group_by_order(series, args.order)
    given = _given_params(args)
    if given is None:
        result = fit(grouped, solver_config(args))
        if not result.converged:
            raise CliError(
                f"solver did not converge after {result.iterations} iterations "
                f"(b={result.b!r}, residual={result.residual!r})"
            )
        model = result.model
        fit_summary = result.to_dict()
    else:
        result = None
        model = OrderedGoModel(given, args.order)
        fit_summary = {"a": given.a, "b": given.b, "r": args.order, "n": grouped.n_groups, "method": "given"}
    limits = control_limits(model)
    chart = build_chart(grouped, model, limits, m_scale=args.m_scale)
    return series, grouped, result, fit_summary, limits, chart


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def build_report(series, grouped, fit_summary, limits, chart) -> dict:
    det = detect(chart)
    return {
        "tool": "relimon",
        "version": __version__,
        "input": {"source": series.source_label, "count": len(series), "sum": series.total},
        "order_r": grouped.order_r,
        "dropped_tail": grouped.dropped_tail,
        "fit": fit_summary,
        "limits": limits.to_dict(),
        "summary": {
            "points": det.n_points,
            "alarms": det.n_alarms,
            "above_ucl": det.n_above_ucl,
            "verdict": det.verdict,
        },
        "chart": chart_to_dict(chart),
    }


def _verdict_code(chart) -> int:
    return EXIT_OUT_OF_CONTROL if detect(chart).verdict == OUT_OF_CONTROL else EXIT_OK


def cmd_fit(args) -> int:
    series = load_series(args)
    grouped = group_by_order(series, args.order)
    result: FitResult = fit(grouped, solver_config(args))
    sys.stdout.write(_dumps(result.to_dict()))
    if not result.converged:
        print(f"error: solver did not converge after {result.iterations} iterations", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_limits(args) -> int:
    _, _, _, fit_summary, limits, chart = run_pipeline(args)
    model = chart.model
    sys.stdout.write(_dumps({"model": {"a": model.a, "b": model.b, "r": model.order_r}, "limits": limits.to_dict()}))
    return EXIT_OK


def _write_chart_files(chart, out: Path, log_y: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "chart.csv").write_text(chart_to_csv(chart))
    (out / "chart.svg").write_text(render_chart_svg(chart, log_y=log_y))


def cmd_chart(args) -> int:
    *_, chart = run_pipeline(args)
    if args.out:
        _write_chart_files(chart, Path(args.out), args.log_y)
    else:
        sys.stdout.write(chart_to_csv(chart))
    return EXIT_OK


def cmd_detect(args) -> int:
    *_, chart = run_pipeline(args)
    sys.stdout.write(_dumps(detect(chart).to_dict()))
    return _verdict_code(chart)


def cmd_report(args) -> int:
    series, grouped, _, fit_summary, limits, chart = run_pipeline(args)
    out = Path(args.out)
    try:
        _write_chart_files(chart, out, args.log_y)
        report = build_report(series, grouped, fit_summary, limits, chart)
        (out / "report.json").write_text(_dumps(report))
    except OSError as exc:
        raise CliError(f"cannot write to {out}: {exc.strerror}") from None
    s = report["summary"]
    print(f"{s['verdict']}: {s['alarms']} of {s['points']} points below LCL; wrote {out}/report.json, chart.csv, chart.svg")
    return _verdict_code(chart)


def cmd_simulate(args) -> int:
    params = GoParams(args.a, args.b)
    if (args.horizon is None) == (args.expected is None):
        raise CliError("give exactly one of --horizon or --expected")
    horizon = args.horizon if args.horizon is not None else horizon_for_expected(params, args.expected)
    cfg = SimConfig(params, horizon, seed=args.seed, replications=args.replications)
    for rep in range(cfg.replications):
        series = simulate_nhpp(cfg, rep)
        if cfg.replications > 1:
            sys.stdout.write(f"# replication {rep}\n")
        if series is not None:
            sys.stdout.write(serialize_failure_data(series, "plain"))
    return EXIT_OK


def _add_input_flags(p):
    p.add_argument("--input", default="musa", help="data file, '-' for stdin, or 'musa' for the bundled dataset (default)")
    p.add_argument("--format", choices=("plain", "csv"), default=None, help="input format (default: by file suffix)")
    p.add_argument("--order", type=_positive_int, default=4, help="subgroup size r (default 4)")


def _add_solver_flags(p):
    g = p.add_argument_group("solver", f"overrides {ENV_BRACKET_LO}, {ENV_BRACKET_HI}, {ENV_TOL}")
    g.add_argument("--bracket-lo", type=_positive_float, default=None, help="lower end of the b search bracket")
    g.add_argument("--bracket-hi", type=_positive_float, default=None, help="upper end of the b search bracket")
    g.add_argument("--tol", type=_positive_float, default=None, help="relative score tolerance")
    g.add_argument("--max-iter", type=_positive_int, default=None)


def _add_model_flags(p):
    p.add_argument("--a", type=_positive_float, default=None, help="known a; skips fitting (requires --b)")
    p.add_argument("--b", type=_positive_float, default=None, help="known b; skips fitting (requires --a)")
    p.add_argument("--m-scale", choices=M_SCALES, default="base", help="chart m(t) scale (default base)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="relimon",
        description="Order-statistics Goel-Okumoto reliability fitting and mean value control charts.",
        epilog="Exit codes: 0 in control / success, 1 error, 2 out of control. "
        "Flag precedence: command line > RELIMON_* environment > built-in defaults.",
    )
    parser.add_argument("--version", action="version", version=f"relimon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="estimate a and b; prints JSON")
    _add_input_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_fit)

    for name, func, help_ in (
        ("limits", cmd_limits, "control limits as JSON"),
        ("chart", cmd_chart, "mean value chart as CSV (or chart.csv/chart.svg under --out)"),
        ("detect", cmd_detect, "out-of-control detection; exit 2 when alarms exist"),
        ("report", cmd_report, "write report.json, chart.csv, chart.svg; exit 2 when out of control"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_input_flags(p)
        _add_solver_flags(p)
        _add_model_flags(p)
        if name in ("chart", "report"):
            p.add_argument("--out", required=name == "report", help="output directory")
            p.add_argument("--log-y", action=argparse.BooleanOptionalAction, default=True,
                           help="log-scale y axis in the SVG (default on)")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="simulate Goel-Okumoto inter-failure times (plain format)")
    p.add_argument("--a", type=_positive_float, required=True)
    p.add_argument("--b", type=_positive_float, required=True)
    p.add_argument("--horizon", type=_positive_float, default=None, help="observation window length")
    p.add_argument("--expected", type=_positive_float, default=None, help="choose the horizon so m(T) equals this")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replications", type=_positive_int, default=1)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
