"""Exact expected-set-size quantification.

The expected size of a split conformal prediction set is the integral of
P{threshold >= r} against the multiplicative factor.  Under i.i.d.
calibration scores that probability is a binomial CDF composed with the
strictly-below step CDF of the score distribution, so against a step CDF
the integral is a finite sum of antiderivative differences and is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .conformal import Threshold, n_alpha
from .factors import (
    FactorSpec,
    UnknownFactorError,
    factor_antiderivative,
    factor_support,
    factor_value,
)
from .special import binomial_cdf_grid

__all__ = [
    "StepTildeCdf",
    "SizeQuery",
    "expected_size_step",
    "expected_size_from_tail",
    "expected_size_discrete_exact",
    "expected_size_unknown_factor",
    "conditional_size_given_feature",
    "conditional_size_given_calibration",
]


@dataclass(frozen=True)
class StepTildeCdf:
    """Left-continuous step function for P{score strictly below r}.

    `values` has one more entry than `breakpoints`: values[0] applies on
    (-inf, breakpoints[0]] and values[j] on (breakpoints[j-1],
    breakpoints[j]], so evaluation at r returns the fraction strictly
    below r.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1:
            raise ValueError("breakpoints and values must be one-dimensional")
        if vals.size != bp.size + 1:
            raise ValueError(
                f"need len(values) == len(breakpoints) + 1, got {vals.size} and {bp.size}"
            )
        if bp.size and np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(vals) < 0):
            raise ValueError("values must be non-decreasing")
        if vals.size and (vals[0] < 0.0 or vals[-1] > 1.0):
            raise ValueError("values must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def value_at(self, r):
        """Evaluate at a scalar or array of scores."""
        idx = np.searchsorted(self.breakpoints, r, side="left")
        out = self.values[idx]
        if np.isscalar(r) or np.asarray(r).ndim == 0:
            return float(out)
        return out

    def steps(self):
        """Enumerate (breakpoint, value just above it) pairs."""
        return list(zip(self.breakpoints, self.values[1:]))


@dataclass(frozen=True)
class SizeQuery:
    """Configuration of one expected-size evaluation."""

    n: int
    alpha: float
    factor: FactorSpec
    integration_upper: float = math.inf

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


def _integrate_step_tail(
    breakpoints: np.ndarray,
    tail_values: np.ndarray,
    factor: FactorSpec,
    upper: float,
) -> float:
    """Integrate a step tail probability against a continuous factor.

    tail_values[j] is the integrand value on the j'th segment of the
    partition induced by the breakpoints (same left-continuous convention
    as StepTildeCdf).  Exact: each segment contributes value * (F(b) -
    F(a)) through the factor antiderivative.
    """
    support = factor_support(factor)
    lo = support.lower
    hi = min(upper, support.upper)
    if hi <= lo:
        return 0.0

    inside = (breakpoints > lo) & (breakpoints < hi)
    edges = np.concatenate(([lo], breakpoints[inside], [hi]))
    # Segment (edges[i], edges[i+1]] takes the step value at its right edge.
    idx = np.searchsorted(breakpoints, edges[1:], side="left")
    seg_values = tail_values[idx]

    contributions = []
    f_prev = factor_antiderivative(factor, edges[0])
    for right, val in zip(edges[1:], seg_values):
        f_right = factor_antiderivative(factor, right)
        if val == 0.0:
            f_prev = f_right
            continue
        width = f_right - f_prev
        if math.isinf(width):
            return math.inf
        contributions.append(val * width)
        f_prev = f_right
    return math.fsum(contributions)


def expected_size_step(tilde: StepTildeCdf, q: SizeQuery) -> float:
    """Expected prediction-set size for a step score CDF and analytic factor.

    Computed exactly as a finite sum over the step segments; regions where
    the CDF has reached 1 contribute nothing whenever the threshold rank
    stays below n, so unbounded supports need no artificial truncation.
    Returns +inf when the infinite-threshold regime meets an unbounded
    integration range.
    """
    if not q.factor.is_analytic:
        raise UnknownFactorError("expected_size_step needs an analytic factor")
    n_a = n_alpha(q.n, q.alpha)

    if q.factor.is_discrete:
        support = factor_support(q.factor)
        atoms = [a for a in support.atoms if a <= q.integration_upper]
        if not atoms:
            return 0.0
        probs = np.asarray([tilde.value_at(a) for a in atoms])
        cdf = binomial_cdf_grid(q.n, probs, n_a)
        weights = np.asarray([factor_value(q.factor, a) for a in atoms])
        return float(np.dot(cdf, weights))

    tail = binomial_cdf_grid(q.n, tilde.values, n_a)
    return _integrate_step_tail(tilde.breakpoints, tail, q.factor, q.integration_upper)


def expected_size_from_tail(
    breakpoints: Sequence[float],
    tail_values: Sequence[float],
    factor: FactorSpec,
    integration_upper: float = math.inf,
) -> float:
    """Expected size from an arbitrary step threshold-tail probability.

    This is the general (non-i.i.d.) form: the caller supplies
    P{threshold >= r} directly as a step function instead of the
    binomial-CDF composition; tail_values[j] applies on the j'th segment
    under the same left-continuous convention as StepTildeCdf.
    """
    if not factor.is_analytic or factor.is_discrete:
        raise UnknownFactorError("tail integration needs a continuous analytic factor")
    bp = np.asarray(breakpoints, dtype=float)
    tv = np.asarray(tail_values, dtype=float)
    if tv.size != bp.size + 1:
        raise ValueError("need len(tail_values) == len(breakpoints) + 1")
    if np.any(tv < 0.0) or np.any(tv > 1.0):
        raise ValueError("tail probabilities must lie in [0, 1]")
    if np.any(np.diff(tv) > 0):
        raise ValueError("threshold tail probabilities must be non-increasing in r")
    return _integrate_step_tail(bp, tv, factor, integration_upper)


def expected_size_discrete_exact(
    tilde_values: Sequence[float],
    factor_weights: Sequence[float],
    n: int,
    alpha: float,
) -> float:
    """Counting-measure expected size: sum of binomial CDFs times weights."""
    tv = np.asarray(tilde_values, dtype=float)
    fw = np.asarray(factor_weights, dtype=float)
    if tv.shape != fw.shape:
        raise ValueError(
            f"length mismatch: {tv.size} tilde values vs {fw.size} weights"
        )
    if np.any(np.diff(tv) < 0):
        raise ValueError("tilde values must be non-decreasing")
    cdf = binomial_cdf_grid(n, tv, n_alpha(n, alpha))
    return float(np.dot(cdf, fw))


def expected_size_unknown_factor(
    tilde: StepTildeCdf,
    matrix,
    n: int,
    alpha: float,
) -> float:
    """Factor-free expected size from a score matrix (nested estimator core).

    matrix carries scores[i, j] = R(X'_i, y_j) over a label grid with
    weights w_j; the result is sum_j w_j * mean_i P_B(n, tilde(scores[i,j]))(n_alpha).
    """
    scores = np.asarray(matrix.scores, dtype=float)
    weights = np.asarray(matrix.weights, dtype=float)
    if scores.size == 0:
        raise ValueError("score matrix is empty")
    n_a = n_alpha(n, alpha)
    probs = tilde.value_at(scores.ravel())
    cdf = binomial_cdf_grid(n, probs, n_a).reshape(scores.shape)
    per_label = cdf.mean(axis=0)
    return float(np.dot(per_label, weights))


def conditional_size_given_feature(
    tilde: StepTildeCdf,
    feature_scores: Sequence[float],
    n: int,
    alpha: float,
    weights: Sequence[float] | None = None,
) -> float:
    """Expected size conditioned on a test feature.

    The feature-specific factor collapses onto the observed scores
    R(x, y_j), so the integral becomes a weighted sum over the label grid.
    """
    fs = np.asarray(feature_scores, dtype=float)
    if fs.size == 0:
        raise ValueError("feature score row is empty")
    w = np.ones_like(fs) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != fs.shape:
        raise ValueError("feature scores and weights must have equal length")
    cdf = binomial_cdf_grid(n, tilde.value_at(fs), n_alpha(n, alpha))
    return float(np.dot(cdf, w))


def conditional_size_given_calibration(
    threshold: Threshold, factor: FactorSpec
) -> float:
    """Exact set size once the calibration data (hence threshold) is fixed.

    For continuous factors this is the antiderivative mass of the
    acceptance region {r <= threshold}; for discrete factors, the summed
    weights of accepted atoms.
    """
    if not factor.is_analytic:
        raise UnknownFactorError("conditional size needs an analytic factor")
    support = factor_support(factor)
    if factor.is_discrete:
        return math.fsum(
            factor_value(factor, a) for a in support.atoms if threshold.accepts(a)
        )
    if threshold.value <= support.lower:
        return 0.0
    if threshold.is_infinite and math.isinf(support.upper):
        return math.inf
    top = min(threshold.value, support.upper)
    return factor_antiderivative(factor, top) - factor_antiderivative(
        factor, support.lower
    )
