"""Command-line surface.

Subcommands:
  estimate         point/interval size estimate from a score file (known factor)
  estimate-matrix  factor-free estimate from a score matrix plus marginal scores
  conditional      size estimate conditioned on one test feature's score row
  synthetic        beta-binomial validation grid -> CSV (and optional figures)
  mc               Monte Carlo average and concentration baselines (synthetic model)
  coverage         empirical miscoverage of the conformal construction

Exit codes: 0 success, 2 usage error, 3 data error, 4 infinite-result
condition (the infinite-threshold regime is reported, never silently inf).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .baselines import (
    SizeSampleSet,
    bernstein_interval,
    clt_interval,
    derive_rng,
    hoeffding_interval,
    mc_sizes,
)
from .conformal import ScoreSample, compute_threshold, n_alpha
from .estimators import (
    conditional_point_estimate_feature,
    interval_estimate_known,
    interval_estimate_unknown,
    point_estimate_known,
    point_estimate_unknown,
)
from .factors import format_factor, parse_factor
from .scorers import ScoreMatrix, trapezoid_weights
from .synthetic import SyntheticConfig, records_to_csv, run_grid, sample_scores, size_at_threshold, theoretical_size

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class DataError(Exception):
    """Malformed input file or inconsistent data."""


def _encode(value):
    if value is None:
        return None
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
    return value


def _emit(payload: dict, stream=None) -> None:
    body = {"schema_version": SCHEMA_VERSION}
    body.update({k: _encode(v) for k, v in payload.items()})
    json.dump(body, stream or sys.stdout, indent=2)
    (stream or sys.stdout).write("\n")


def _read_scores(path: str) -> np.ndarray:
    """One score per line; an optional leading 'score' header is allowed."""
    values = []
    try:
        with open(path, newline="") as fh:
            for ln, row in enumerate(csv.reader(fh), start=1):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                cell = row[0].strip()
                if ln == 1 and cell.lower() == "score":
                    continue
                if len(row) != 1:
                    raise DataError(f"{path}:{ln}: expected a single column")
                try:
                    values.append(float(cell))
                except ValueError as exc:
                    raise DataError(f"{path}:{ln}: not a number: {cell!r}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not values:
        raise DataError(f"{path}: no scores found")
    return np.asarray(values)


def _read_matrix(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Header row of label-grid values, then one score row per point."""
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if any(c.strip() for c in row)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise DataError(f"{path}: need a grid header row plus at least one score row")
    try:
        grid = np.asarray([float(c) for c in rows[0]])
        data = np.asarray([[float(c) for c in row] for row in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell: {exc}") from exc
    if data.shape[1] != grid.size:
        raise DataError(f"{path}: row width differs from the grid header")
    return grid, data


def _label_weights(grid: np.ndarray, measure: str) -> np.ndarray:
    if measure == "counting":
        return np.ones(grid.size)
    try:
        return trapezoid_weights(grid)
    except ValueError as exc:
        raise DataError(f"trapezoid measure needs an increasing grid: {exc}") from exc


def _float_list(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad {name} list {text!r}") from exc


def _int_list(text: str, name: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad {name} list {text!r}") from exc


def _resolve_seed(seed):
    """Fixed seed when given; otherwise draw one and report it."""
    if seed is not None:
        return int(seed), False
    return int(np.random.SeedSequence().entropy % (2**63)), True


def _estimate_payload(est, extra: dict) -> dict:
    meta = est.meta
    payload = {
        "point": est.point,
        "k": meta.k,
        "n": meta.n,
        "alpha": meta.alpha,
        "n_alpha": meta.n_alpha,
        "estimator": meta.estimator_kind,
    }
    if est.has_interval:
        payload.update(
            {
                "lower": est.lower,
                "upper": est.upper,
                "gamma": est.gamma,
                "dkw_delta": meta.dkw_delta,
                "heuristic_interval": meta.heuristic_interval,
            }
        )
    payload.update(extra)
    infinite = math.isinf(est.point) or (est.upper is not None and math.isinf(est.upper))
    payload["infinite_threshold_regime"] = bool(infinite)
    return payload


def _finish_estimate(est, extra: dict) -> int:
    payload = _estimate_payload(est, extra)
    _emit(payload)
    return EXIT_NUMERIC if payload["infinite_threshold_regime"] else EXIT_OK


def cmd_estimate(args) -> int:
    try:
        factor = parse_factor(args.factor)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not factor.is_analytic:
        raise UsageError(
            "the 'unknown' factor has no analytic path; use estimate-matrix"
        )
    scores = _read_scores(args.scores)
    sample = ScoreSample.from_scores(scores)
    if args.gamma is not None:
        est = interval_estimate_known(
            sample, args.n, args.alpha, factor, args.gamma,
            integration_upper=args.integration_max,
        )
        truncation = est.meta.integration_upper
    else:
        est = point_estimate_known(sample, args.n, args.alpha, factor)
        truncation = math.inf
    return _finish_estimate(
        est, {"factor": format_factor(factor), "truncation": truncation}
    )


def cmd_estimate_matrix(args) -> int:
    grid, data = _read_matrix(args.matrix)
    marginal = _read_scores(args.marginal)
    if marginal.size != data.shape[0]:
        raise DataError(
            f"{args.marginal}: {marginal.size} marginal scores for "
            f"{data.shape[0]} matrix rows"
        )
    weights = _label_weights(grid, args.label_measure)
    matrix = ScoreMatrix(scores=data, grid=grid, weights=weights, marginal=marginal)
    if args.gamma is not None:
        est = interval_estimate_unknown(matrix, args.n, args.alpha, args.gamma)
    else:
        est = point_estimate_unknown(matrix, args.n, args.alpha)
    return _finish_estimate(
        est,
        {
            "factor": "unknown",
            "label_measure": args.label_measure,
            "grid_points": int(grid.size),
        },
    )


def cmd_conditional(args) -> int:
    scores = _read_scores(args.scores)
    if args.label_measure == "trapezoid":
        grid, rows = _read_matrix(args.row)
        if rows.shape[0] != 1:
            raise DataError(f"{args.row}: expected exactly one score row")
        feature_row = rows[0]
        weights = _label_weights(grid, "trapezoid")
    else:
        feature_row = _read_scores(args.row)
        weights = None
    est = conditional_point_estimate_feature(
        ScoreSample.from_scores(scores), feature_row, args.n, args.alpha, weights
    )
    return _finish_estimate(
        est, {"labels": int(np.asarray(feature_row).size), "label_measure": args.label_measure}
    )


def cmd_synthetic(args) -> int:
    seed, chosen = _resolve_seed(args.seed)
    records = run_grid(
        a_set=args.a,
        b_set=args.b,
        m_set=args.m,
        n_set=args.n,
        gamma_set=args.gamma,
        alpha=args.alpha,
        runs_per_setting=args.runs,
        repeats=args.repeats,
        master_seed=seed,
        threads=args.threads,
    )
    text = records_to_csv(records)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if chosen or args.out:
        sys.stderr.write(f"# seed={seed}\n")
    if args.plot_dir:
        from .plots import render_grid_figures

        paths = render_grid_figures(records, args.plot_dir)
        for p in paths:
            sys.stderr.write(f"# figure: {p}\n")
    return EXIT_OK


def cmd_mc(args) -> int:
    seed, _ = _resolve_seed(args.seed)
    config = SyntheticConfig(m=args.m, a=args.a, b=args.b)

    def sampler(rng, count):
        return sample_scores(config, count, rng).scores

    sizes = mc_sizes(
        sampler,
        lambda tau: size_at_threshold(config, tau),
        args.n,
        args.alpha,
        args.runs,
        seed,
    )
    bound = config.weight * config.m
    samples = SizeSampleSet(sizes, bound=bound)
    payload = {
        "mean_size": float(sizes.mean()),
        "mc_se": float(sizes.std(ddof=1) / math.sqrt(args.runs)) if args.runs > 1 else 0.0,
        "theoretical": theoretical_size(config, args.n, args.alpha),
        "runs": args.runs,
        "n": args.n,
        "alpha": args.alpha,
        "size_bound": bound,
        "seed": seed,
    }
    if args.runs > 1:
        intervals = {
            "clt": clt_interval(samples, args.gamma),
            "hoeffding": hoeffding_interval(samples, args.gamma),
            "bernstein": bernstein_interval(samples, args.gamma),
        }
        payload["gamma"] = args.gamma
        payload["intervals"] = {
            name: {
                "lower": iv.lower,
                "upper": iv.upper,
                "heuristic": iv.heuristic,
            }
            for name, iv in intervals.items()
        }
    _emit(payload)
    return EXIT_OK


def cmd_coverage(args) -> int:
    seed, _ = _resolve_seed(args.seed)
    rng = derive_rng(seed)
    misses = 0
    for _ in range(args.trials):
        draws = rng.random(args.n + 1)
        tau = compute_threshold(ScoreSample.from_scores(draws[: args.n]), args.alpha)
        if not tau.accepts(draws[args.n]):
            misses += 1
    n_a = n_alpha(args.n, args.alpha)
    payload = {
        "miscoverage": misses / args.trials,
        "trials": args.trials,
        "n": args.n,
        "alpha": args.alpha,
        "n_alpha": n_a,
        "exact_miscoverage_continuous": 1.0 - (n_a + 1) / (args.n + 1),
        "seed": seed,
    }
    _emit(payload)
    return EXIT_OK


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confsize",
        description="Expected prediction-set size estimation for split conformal prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="known-factor estimate from a score file")
    p.add_argument("scores", help="CSV of accessible scores, one per line")
    p.add_argument("--n", type=int, required=True, help="calibration size")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--factor", required=True, help="l1 | lp:<p> | lp:<p>:<m> | zero-one:<L>")
    p.add_argument("--gamma", type=float, default=None, help="emit a 1-gamma interval")
    p.add_argument(
        "--integration-max",
        type=float,
        default=None,
        help="known score-space upper bound (default: largest accessible score, upper bound only)",
    )
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("estimate-matrix", help="factor-free estimate from a score matrix")
    p.add_argument("matrix", help="CSV: header = label grid, rows = R(X'_i, y_j)")
    p.add_argument("marginal", help="CSV of marginal scores R(X'_i, Y'_i)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--label-measure", choices=["counting", "trapezoid"], default="counting")
    p.set_defaults(func=cmd_estimate_matrix)

    p = sub.add_parser("conditional", help="estimate conditioned on one feature's score row")
    p.add_argument("scores", help="CSV of accessible scores")
    p.add_argument("row", help="CSV of the feature's scores over the label grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--label-measure", choices=["counting", "trapezoid"], default="counting")
    p.set_defaults(func=cmd_conditional)

    p = sub.add_parser("synthetic", help="beta-binomial validation grid -> CSV")
    p.add_argument("--a", type=lambda s: _float_list(s, "a"), default=[0.0625, 0.25, 1.0, 4.0, 16.0])
    p.add_argument("--b", type=lambda s: _float_list(s, "b"), default=[0.0625, 0.25, 1.0, 4.0, 16.0])
    p.add_argument("--m", type=lambda s: _int_list(s, "m"), default=[10, 100])
    p.add_argument("--n", type=lambda s: _int_list(s, "n"), default=[10, 100, 1000])
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--gamma", type=lambda s: _float_list(s, "gamma"), default=[0.1, 0.01])
    p.add_argument("--runs", type=int, default=200, help="MC runs per cell")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--plot-dir", default=None, help="also render report figures here")
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("SIZE_CLI_THREADS", "1")),
        help="parallel grid cells (env fallback SIZE_CLI_THREADS)",
    )
    p.set_defaults(func=cmd_synthetic)

    p = sub.add_parser("mc", help="MC average and baseline intervals on the synthetic model")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("coverage", help="empirical miscoverage with continuous scores")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_coverage)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
