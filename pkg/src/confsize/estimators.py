"""Practical size estimators from accessible data.

A single i.i.d. sample of k non-conformity scores yields the empirical
strictly-below CDF; plugging it (or its uniform DKW band) into the exact
size formula gives point estimates and high-probability intervals.  The
empirical CDF does not depend on (n, alpha), so one sample serves any
number of configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .conformal import ScoreSample, n_alpha
from .factors import FactorSpec, UnknownFactorError
from .size import (
    SizeQuery,
    StepTildeCdf,
    conditional_size_given_feature,
    expected_size_step,
    expected_size_unknown_factor,
)

__all__ = [
    "DkwRadius",
    "EstimateMeta",
    "SizeEstimate",
    "empirical_tilde_cdf",
    "dkw_radius",
    "point_estimate_known",
    "interval_estimate_known",
    "point_estimate_unknown",
    "interval_estimate_unknown",
    "conditional_point_estimate_feature",
]


@dataclass(frozen=True)
class DkwRadius:
    """Uniform CDF deviation bound sqrt(ln(2/gamma) / (2k))."""

    k: int
    gamma: float
    delta: float


@dataclass(frozen=True)
class EstimateMeta:
    """Provenance of a size estimate."""

    k: int
    n: int
    alpha: float
    n_alpha: int
    estimator_kind: str
    factor: Optional[FactorSpec] = None
    integration_upper: float = math.inf
    gamma: Optional[float] = None
    dkw_delta: Optional[float] = None
    heuristic_interval: bool = False


@dataclass(frozen=True)
class SizeEstimate:
    """Point value with an optional (lower, upper, gamma) interval."""

    point: float
    lower: Optional[float] = None
    upper: Optional[float] = None
    gamma: Optional[float] = None
    meta: Optional[EstimateMeta] = None

    @property
    def has_interval(self) -> bool:
        return self.lower is not None and self.upper is not None


def _as_sample(accessible: ScoreSample | Iterable[float]) -> ScoreSample:
    if isinstance(accessible, ScoreSample):
        return accessible
    return ScoreSample.from_scores(accessible)


def empirical_tilde_cdf(accessible: ScoreSample | Iterable[float]) -> StepTildeCdf:
    """Empirical strictly-below CDF of the accessible scores.

    The value at r is the fraction of scores strictly below r, so the step
    sits at each distinct score and ties share one breakpoint.
    """
    sample = _as_sample(accessible)
    k = len(sample)
    if k == 0:
        raise ValueError("accessible sample is empty")
    distinct, counts = np.unique(sample.scores, return_counts=True)
    values = np.concatenate(([0.0], np.cumsum(counts) / k))
    return StepTildeCdf(distinct, values)


def dkw_radius(k: int, gamma: float) -> DkwRadius:
    """DKW band half-width at confidence 1 - gamma from k samples."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    return DkwRadius(k, gamma, math.sqrt(math.log(2.0 / gamma) / (2.0 * k)))


def _shifted(tilde: StepTildeCdf, delta: float) -> StepTildeCdf:
    vals = np.clip(tilde.values + delta, 0.0, 1.0)
    return StepTildeCdf(tilde.breakpoints, vals)


def point_estimate_known(
    accessible: ScoreSample | Iterable[float],
    n: int,
    alpha: float,
    factor: FactorSpec,
) -> SizeEstimate:
    """Point estimate of the expected set size under a known factor."""
    if not factor.is_analytic:
        raise UnknownFactorError(
            "point_estimate_known needs an analytic factor; use the score-matrix path"
        )
    sample = _as_sample(accessible)
    tilde = empirical_tilde_cdf(sample)
    point = expected_size_step(tilde, SizeQuery(n, alpha, factor))
    meta = EstimateMeta(
        k=len(sample),
        n=n,
        alpha=alpha,
        n_alpha=n_alpha(n, alpha),
        estimator_kind="point_known",
        factor=factor,
    )
    return SizeEstimate(point=point, meta=meta)


def interval_estimate_known(
    accessible: ScoreSample | Iterable[float],
    n: int,
    alpha: float,
    factor: FactorSpec,
    gamma: float,
    integration_upper: Optional[float] = None,
) -> SizeEstimate:
    """Point estimate plus a 1 - gamma confidence interval (known factor).

    The lower bound shifts the empirical CDF up by the DKW radius, the
    upper bound shifts it down.  On unbounded supports the shifted-down
    CDF stays below 1 past all data, so by default the upper integral is
    truncated at the largest accessible score.  An explicit
    `integration_upper` asserts a known bounded score space and applies
    to all three integrals, keeping lower <= point <= upper in every
    regime.
    """
    if not factor.is_analytic:
        raise UnknownFactorError(
            "interval_estimate_known needs an analytic factor; use the score-matrix path"
        )
    sample = _as_sample(accessible)
    k = len(sample)
    if k == 0:
        raise ValueError("accessible sample is empty")
    radius = dkw_radius(k, gamma)
    tilde = empirical_tilde_cdf(sample)

    if integration_upper is None:
        full_cut = math.inf
        if factor.is_discrete or n_alpha(n, alpha) >= n:
            # Discrete supports are finite sums; in the infinite-threshold
            # regime the honest upper bound is infinite, not a truncation.
            upper_cut = math.inf
        else:
            upper_cut = float(sample.scores[-1])
    else:
        full_cut = upper_cut = float(integration_upper)

    point = expected_size_step(
        tilde, SizeQuery(n, alpha, factor, integration_upper=full_cut)
    )
    lower = expected_size_step(
        _shifted(tilde, radius.delta),
        SizeQuery(n, alpha, factor, integration_upper=full_cut),
    )
    upper = expected_size_step(
        _shifted(tilde, -radius.delta),
        SizeQuery(n, alpha, factor, integration_upper=upper_cut),
    )
    meta = EstimateMeta(
        k=k,
        n=n,
        alpha=alpha,
        n_alpha=n_alpha(n, alpha),
        estimator_kind="interval_known",
        factor=factor,
        integration_upper=upper_cut,
        gamma=gamma,
        dkw_delta=radius.delta,
    )
    return SizeEstimate(point=point, lower=lower, upper=upper, gamma=gamma, meta=meta)


def _matrix_tilde(matrix) -> tuple[StepTildeCdf, int]:
    marginal = np.asarray(matrix.marginal, dtype=float)
    if marginal.size == 0:
        raise ValueError("score matrix carries no marginal scores")
    return empirical_tilde_cdf(ScoreSample.from_scores(marginal)), int(marginal.size)


def point_estimate_unknown(matrix, n: int, alpha: float) -> SizeEstimate:
    """Factor-free point estimate from a score matrix.

    The same k accessible points feed both the empirical CDF (via their
    marginal scores) and the outer average over matrix rows.
    """
    tilde, k = _matrix_tilde(matrix)
    point = expected_size_unknown_factor(tilde, matrix, n, alpha)
    meta = EstimateMeta(
        k=k,
        n=n,
        alpha=alpha,
        n_alpha=n_alpha(n, alpha),
        estimator_kind="point_unknown",
    )
    return SizeEstimate(point=point, meta=meta)


def interval_estimate_unknown(
    matrix, n: int, alpha: float, gamma: float
) -> SizeEstimate:
    """Factor-free interval via the +/- DKW shift inside the nested estimator.

    The extra nested approximation means these are heuristic bounds, not
    proven confidence intervals; meta flags them as such.
    """
    tilde, k = _matrix_tilde(matrix)
    radius = dkw_radius(k, gamma)
    point = expected_size_unknown_factor(tilde, matrix, n, alpha)
    lower = expected_size_unknown_factor(
        _shifted(tilde, radius.delta), matrix, n, alpha
    )
    upper = expected_size_unknown_factor(
        _shifted(tilde, -radius.delta), matrix, n, alpha
    )
    meta = EstimateMeta(
        k=k,
        n=n,
        alpha=alpha,
        n_alpha=n_alpha(n, alpha),
        estimator_kind="interval_unknown",
        gamma=gamma,
        dkw_delta=radius.delta,
        heuristic_interval=True,
    )
    return SizeEstimate(point=point, lower=lower, upper=upper, gamma=gamma, meta=meta)


def conditional_point_estimate_feature(
    accessible: ScoreSample | Iterable[float],
    feature_scores: Sequence[float],
    n: int,
    alpha: float,
    weights: Sequence[float] | None = None,
) -> SizeEstimate:
    """Point estimate of the set size conditioned on one test feature."""
    sample = _as_sample(accessible)
    tilde = empirical_tilde_cdf(sample)
    point = conditional_size_given_feature(tilde, feature_scores, n, alpha, weights)
    meta = EstimateMeta(
        k=len(sample),
        n=n,
        alpha=alpha,
        n_alpha=n_alpha(n, alpha),
        estimator_kind="conditional_feature",
    )
    return SizeEstimate(point=point, meta=meta)
