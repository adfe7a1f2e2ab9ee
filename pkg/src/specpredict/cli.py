"""Command line: ingest weight specs, run predictors and verifications, emit
deterministic JSON/CSV and optional figures.

Exit codes: 0 on success, 2 when a verification report fails, 1 on input or
computation errors (one diagnostic line naming the error).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import duality, predictors, weights
from .errors import ParseError, SpecPredictError
from .factorization import OuterFactor, factorize
from .index_sets import IndexSetSpec, parse_index_set
from .jsonio import dumps_canonical, format_csv_row
from .predictors import PredictionSolution, Predictor

DEFAULT_TRUNCATION = 512
DEFAULT_WINDOW = 128


def _default_grid() -> int:
    value = os.environ.get("SPECPREDICT_GRID")
    if value is None:
        return weights.DEFAULT_GRID_SIZE
    try:
        return int(value)
    except ValueError as exc:
        raise ParseError(f"SPECPREDICT_GRID must be an integer, got {value!r}") from exc


def _load_weight(path: str) -> weights.WeightFunction:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read weight spec {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"weight spec {path!r} is not valid JSON: {exc}") from exc
    return weights.WeightFunction.from_json_dict(data)


def _load_factor(path: str) -> OuterFactor:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read factor file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"factor file {path!r} is not valid JSON: {exc}") from exc
    return OuterFactor.from_json_dict(data)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _sorted_eigenvalues(delta: np.ndarray) -> list[float]:
    return [float(v) for v in np.linalg.eigvalsh(delta)]


def _solution_text(solution: PredictionSolution, fmt: str) -> str:
    if fmt == "json":
        return dumps_canonical(solution.to_json_dict(), indent=2)
    if fmt == "csv":
        eigs = _sorted_eigenvalues(solution.delta)
        header = "set,delta_scalar," + ",".join(f"eig_{i + 1}" for i in range(len(eigs)))
        row = format_csv_row([solution.index_set.to_text(), solution.delta_scalar_value, *eigs])
        return header + "\n" + row
    lines = [f"set: {solution.index_set.to_text()}"]
    lines.append(f"delta_scalar: {solution.delta_scalar_value:.12g}")
    lines.append("delta:")
    for row in np.asarray(solution.delta):
        lines.append("  " + "  ".join(f"{v.real:+.10e}{v.imag:+.10e}j" for v in row))
    return "\n".join(lines)


def _predict_from_set(args, weight, spec: IndexSetSpec) -> PredictionSolution:
    grid = args.grid
    if spec.family == "all-but-zero":
        return predictors.interpolate_all(weight, grid)
    if spec.family == "gap":
        return predictors.yaglom_gap(weight, spec.n, grid)
    if spec.family in ("past", "nakazi", "future-one", "missing-past"):
        if args.factor_file:
            factor = _load_factor(args.factor_file)
        else:
            factor = factorize(weight, truncation=args.truncation, n_grid=grid)
        if spec.family == "past":
            solution = predictors.nakazi_predict(factor, 0)
            return PredictionSolution(spec, solution.delta,
                                      solution.delta_scalar_value, solution.predictor)
        if spec.family == "nakazi":
            return predictors.nakazi_predict(factor, spec.n)
        if spec.family == "future-one":
            delta = predictors.single_future_delta(factor, spec.n)
        else:
            delta = predictors.missing_past_delta(factor, spec.n)
        return PredictionSolution(spec, delta, predictors.delta_scalar(delta), None)
    if spec.family == "window":
        samples = weight.evaluate_on_grid(grid)
        coeffs, delta = duality.gram_project(samples, list(spec.lags))
        predictor = Predictor(kind="frequency_coefficients", coefficients=coeffs)
        return PredictionSolution(spec, delta, predictors.delta_scalar(delta), predictor)
    if spec.family == "cyclic":
        samples = weight.evaluate_on_grid(spec.n_points)
        coeffs, delta, _ = duality.cyclic_project(samples, spec.cyclic_lags())
        predictor = Predictor(kind="frequency_coefficients", coefficients=coeffs)
        return PredictionSolution(spec, delta, predictors.delta_scalar(delta), predictor)
    raise ParseError(f"cannot predict for family {spec.family!r}")


def _cmd_predict(args) -> int:
    weight = _load_weight(args.weight)
    spec = parse_index_set(args.set)
    solution = _predict_from_set(args, weight, spec)
    _emit(_solution_text(solution, args.format), args.output)
    return 0


def _cmd_factorize(args) -> int:
    weight = _load_weight(args.weight)
    factor = factorize(weight, truncation=args.truncation, n_grid=args.grid)
    _emit(dumps_canonical(factor.to_json_dict(), indent=2), args.output)
    return 0


def _cmd_verify(args) -> int:
    weight = _load_weight(args.weight)
    if args.theorem == "cyclic":
        spec = parse_index_set(args.set)
        if spec.family != "cyclic":
            raise ParseError("verify --theorem cyclic needs --set cyclic:N:[...]")
        samples = weight.evaluate_on_grid(spec.n_points)
        model = duality.CyclicModel(
            n_points=spec.n_points, q=weight.q, samples=samples, subset=spec.lags
        )
        report = duality.cyclic_exact_verify(model)
    else:
        spec = parse_index_set(args.set)
        section = duality.FiniteSection(weight, args.grid)
        checks = {
            "3.2": duality.dual_projection_check,
            "3.6": duality.dual_infimum_check,
            "3.7": duality.trace_normalized_check,
        }
        report = checks[args.theorem](section, spec, window=args.window, tol=args.tol)
    report_dict = report.to_json_dict()
    if args.format == "pretty":
        _emit(_report_table(report_dict), args.output)
    else:
        _emit(dumps_canonical(report_dict, indent=2), args.output)
    if args.plot:
        from .report import render_verify_figure

        render_verify_figure(report_dict, args.tol, args.plot)
    return 0 if report.passed else 2


def _report_table(report_dict: dict) -> str:
    width = max(len(k) for k in report_dict["deviations"]) + 2
    lines = [
        f"check {report_dict['theorem']}   K={report_dict['K']}   "
        f"grid={report_dict['N_grid']}   {'pass' if report_dict['pass'] else 'FAIL'}",
        "-" * (width + 24),
    ]
    for key, value in report_dict["deviations"].items():
        lines.append(f"{key:<{width}}{value: .6e}")
    return "\n".join(lines)


def _cmd_sweep(args) -> int:
    weight = _load_weight(args.weight)
    family = args.set.strip()
    if family not in ("nakazi", "gap", "future-one", "missing-past"):
        raise ParseError(
            f"sweep supports nakazi, gap, future-one, missing-past; got {family!r}"
        )
    start = 0 if family == "nakazi" else 1
    if args.n_max < start:
        raise ParseError(f"--n-max must be at least {start} for family {family!r}")

    factor = None
    if family != "gap":
        if args.factor_file:
            factor = _load_factor(args.factor_file)
        else:
            factor = factorize(weight, truncation=args.truncation, n_grid=args.grid)

    rows = []
    for n in range(start, args.n_max + 1):
        if family == "gap":
            solution = predictors.yaglom_gap(weight, n, args.grid)
            delta, scalar = solution.delta, solution.delta_scalar_value
        elif family == "nakazi":
            solution = predictors.nakazi_predict(factor, n)
            delta, scalar = solution.delta, solution.delta_scalar_value
        elif family == "future-one":
            delta = predictors.single_future_delta(factor, n)
            scalar = predictors.delta_scalar(delta)
        else:
            delta = predictors.missing_past_delta(factor, n)
            scalar = predictors.delta_scalar(delta)
        rows.append((n, scalar, *_sorted_eigenvalues(delta)))

    header = "n,delta_scalar," + ",".join(f"eig_{i + 1}" for i in range(weight.q))
    text = header + "\n" + "\n".join(format_csv_row(row) for row in rows)
    _emit(text, args.output)
    if args.plot:
        from .report import render_sweep_figure

        render_sweep_figure(rows, weight.q, family, args.plot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specpredict",
        description="Prediction error matrices and predictors from a matrix "
                    "spectral density, with finite-section verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_window=False):
        p.add_argument("weight", help="path to a weight spec (JSON)")
        p.add_argument("--grid", type=int, default=None,
                       help="grid size (power of two; default 4096 or SPECPREDICT_GRID)")
        p.add_argument("--truncation", "-L", type=int, default=None,
                       help=f"factor truncation length (default {DEFAULT_TRUNCATION})")
        if with_window:
            p.add_argument("--window", "-K", type=int, default=DEFAULT_WINDOW,
                           help=f"finite-section window (default {DEFAULT_WINDOW})")
        p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")

    p_predict = sub.add_parser("predict", help="closed-form prediction for one index set")
    add_common(p_predict, with_window=True)
    p_predict.add_argument("--set", required=True, help="index set, e.g. nakazi:2 or gap:1")
    p_predict.add_argument("--factor-file", default=None,
                           help="reuse a saved factor instead of factorizing the weight")
    p_predict.add_argument("--format", choices=("json", "csv", "pretty"), default="json")

    p_fact = sub.add_parser("factorize", help="outer factor of the weight as JSON")
    add_common(p_fact)

    p_verify = sub.add_parser("verify", help="run one duality verification")
    add_common(p_verify, with_window=True)
    p_verify.add_argument("--theorem", required=True, choices=("3.2", "3.6", "3.7", "cyclic"),
                          help="which identity to check: projection formula (3.2), "
                               "infimum product (3.6), trace-normalized distance (3.7), "
                               "or the exact finite cyclic mode")
    p_verify.add_argument("--set", required=True, help="index set the check runs on")
    p_verify.add_argument("--tol", type=float, default=duality.TOL_DUAL,
                          help="pass tolerance for the report")
    p_verify.add_argument("--format", choices=("json", "pretty"), default="json",
                          help="JSON report or an aligned deviation table")
    p_verify.add_argument("--plot", default=None, help="render the report as a figure (PNG path)")

    p_sweep = sub.add_parser("sweep", help="CSV of (n, scalar figure, delta eigenvalues)")
    add_common(p_sweep)
    p_sweep.add_argument("--set", required=True,
                         help="family to sweep: nakazi, gap, future-one or missing-past")
    p_sweep.add_argument("--n-max", type=int, required=True, help="largest order to include")
    p_sweep.add_argument("--factor-file", default=None,
                         help="reuse a saved factor instead of factorizing the weight")
    p_sweep.add_argument("--plot", default=None, help="render the sweep as a figure (PNG path)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "predict": _cmd_predict,
        "factorize": _cmd_factorize,
        "verify": _cmd_verify,
        "sweep": _cmd_sweep,
    }
    try:
        if getattr(args, "grid", None) is None:
            args.grid = _default_grid()
        if getattr(args, "truncation", None) is None:
            args.truncation = min(DEFAULT_TRUNCATION, args.grid // 8)
        return handlers[args.command](args)
    except SpecPredictError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
