"""Non-conformity scoring functions and score-matrix construction.

Built-in scorers cover the standard families: absolute/powered residuals
(analytic factors), the 0-1 classification loss (discrete factor), and
the probability- and quantile-based scores whose factors are data
dependent and therefore handled through the factor-free estimators.
Toy predictors (constant, closed-form least squares, majority class,
frequency model) exercise every scorer without an ML framework.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .factors import FactorSpec

__all__ = [
    "ScoreMatrix",
    "l1_score",
    "lp_score",
    "zero_one_score",
    "lac_score",
    "cqr_score",
    "aps_score",
    "L1Scorer",
    "LpScorer",
    "ZeroOneScorer",
    "LacScorer",
    "CqrScorer",
    "ApsScorer",
    "build_score_matrix",
    "trapezoid_weights",
    "constant_predictor",
    "least_squares_line",
    "majority_classifier",
    "frequency_prob_model",
]

_SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class ScoreMatrix:
    """Scores of k accessible points over a label grid.

    scores[i, j] = R(X'_i, y_j); `marginal` holds the scores at the true
    labels R(X'_i, Y'_i); `weights` is the label measure (ones for
    counting, trapezoid weights for a continuous grid).
    """

    scores: np.ndarray
    grid: np.ndarray
    weights: np.ndarray
    marginal: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=float)
        grid = np.asarray(self.grid)
        weights = np.asarray(self.weights, dtype=float)
        marginal = np.asarray(self.marginal, dtype=float)
        if scores.ndim != 2:
            raise ValueError("scores must be a k x G matrix")
        k, g = scores.shape
        if k == 0 or g == 0:
            raise ValueError("score matrix must be non-empty")
        if grid.shape != (g,) or weights.shape != (g,):
            raise ValueError("grid and weights must have one entry per column")
        if marginal.shape != (k,):
            raise ValueError("need one marginal score per row")
        if np.any(weights < 0):
            raise ValueError("label weights must be non-negative")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "marginal", marginal)

    @property
    def k(self) -> int:
        return self.scores.shape[0]


def _check_simplex(probs: Sequence[float]) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > _SIMPLEX_TOL:
        raise ValueError("label probabilities must be a simplex vector")
    return p


def l1_score(predictor: Callable, x, y: float) -> float:
    """Absolute residual |M(x) - y|."""
    return abs(predictor(x) - y)


def lp_score(predictor: Callable, x, y: float, p: float) -> float:
    """Powered residual |M(x) - y|^p."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return abs(predictor(x) - y) ** p


def zero_one_score(classifier: Callable, x, y) -> int:
    """0 when the classifier picks y, 1 otherwise."""
    return 0 if classifier(x) == y else 1


def lac_score(prob_model: Callable, x, y: int) -> float:
    """One minus the predicted probability of label y."""
    probs = _check_simplex(prob_model(x))
    return float(1.0 - probs[y])


def cqr_score(quantile_pair: Callable, x, y: float) -> float:
    """Quantile-interval loss max{low - y, y - high}; negative inside."""
    low, high = quantile_pair(x)
    if low > high:
        raise ValueError(f"inverted quantile pair ({low}, {high})")
    return max(low - y, y - high)


def aps_score(prob_model: Callable, x, y: int, u: float) -> float:
    """Cumulative-probability score with a randomized share of label y.

    Sums the probabilities strictly larger than the target label's, plus
    u times the target's own probability; exact ties contribute nothing.
    """
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"u must lie in [0, 1], got {u}")
    probs = _check_simplex(prob_model(x))
    p_y = probs[y]
    return float(u * p_y + probs[probs > p_y].sum())


class L1Scorer:
    """Absolute-residual scorer; factor 2 on [0, inf)."""

    randomized = False

    def __init__(self, predictor: Callable):
        self.predictor = predictor
        self.factor = FactorSpec.l1()
        self.score_space_min = 0.0

    def score(self, x, y) -> float:
        return l1_score(self.predictor, x, y)


class LpScorer:
    """Powered-residual scorer; factor 2 r^{1/p-1} / p on [0, inf)."""

    randomized = False

    def __init__(self, predictor: Callable, p: float):
        if p < 1.0:
            raise ValueError(f"p must be >= 1, got {p}")
        self.predictor = predictor
        self.p = float(p)
        self.factor = FactorSpec.lp(p)
        self.score_space_min = 0.0

    def score(self, x, y) -> float:
        return lp_score(self.predictor, x, y, self.p)


class ZeroOneScorer:
    """Misclassification indicator; weights 1 and L-1 at scores 0 and 1."""

    randomized = False

    def __init__(self, classifier: Callable, num_labels: int):
        self.classifier = classifier
        self.factor = FactorSpec.zero_one(num_labels)
        self.score_space_min = 0.0

    def score(self, x, y) -> int:
        return zero_one_score(self.classifier, x, y)


class LacScorer:
    """Least-ambiguous-classifier score 1 - M_y(x); data-dependent factor."""

    randomized = False

    def __init__(self, prob_model: Callable):
        self.prob_model = prob_model
        self.factor = FactorSpec.unknown()
        self.score_space_min = 0.0

    def score(self, x, y) -> float:
        return lac_score(self.prob_model, x, y)


class CqrScorer:
    """Quantile-interval loss; permits negative scores, unknown factor."""

    randomized = False

    def __init__(self, quantile_pair: Callable):
        self.quantile_pair = quantile_pair
        self.factor = FactorSpec.unknown()
        self.score_space_min = -math.inf

    def score(self, x, y) -> float:
        return cqr_score(self.quantile_pair, x, y)


class ApsScorer:
    """Cumulative-probability score with explicit randomization."""

    randomized = True

    def __init__(self, prob_model: Callable):
        self.prob_model = prob_model
        self.factor = FactorSpec.unknown()
        self.score_space_min = 0.0

    def score(self, x, y, u: float) -> float:
        return aps_score(self.prob_model, x, y, u)


def trapezoid_weights(grid: Sequence[float]) -> np.ndarray:
    """Composite trapezoid quadrature weights for a sorted grid."""
    g = np.asarray(grid, dtype=float)
    if g.size < 2:
        raise ValueError("trapezoid weights need at least two grid points")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    w = np.empty_like(g)
    w[0] = (g[1] - g[0]) / 2.0
    w[-1] = (g[-1] - g[-2]) / 2.0
    w[1:-1] = (g[2:] - g[:-2]) / 2.0
    return w


def build_score_matrix(
    scorer,
    features: Sequence,
    labels: Sequence,
    label_grid: Sequence,
    weights: np.ndarray | str = "counting",
    rng: Optional[np.random.Generator] = None,
) -> ScoreMatrix:
    """Materialize R(X'_i, y_j) over a label grid with a label measure.

    weights may be "counting", "trapezoid", or an explicit array.  For
    randomized scorers one uniform draw per row is shared across the grid
    and the marginal column, so each datum sees a single random share.
    """
    if len(features) == 0:
        raise ValueError("need at least one accessible point")
    if len(features) != len(labels):
        raise ValueError("features and labels must have equal length")
    grid = list(label_grid)
    if not grid:
        raise ValueError("label grid is empty")

    if isinstance(weights, str):
        if weights == "counting":
            w = np.ones(len(grid))
        elif weights == "trapezoid":
            w = trapezoid_weights(np.asarray(grid, dtype=float))
        else:
            raise ValueError(f"unrecognized weight rule {weights!r}")
    else:
        w = np.asarray(weights, dtype=float)

    if scorer.randomized:
        if rng is None:
            raise ValueError("randomized scorer needs an rng for the per-row draws")
        us = rng.random(len(features))
        rows = [
            [scorer.score(x, y, us[i]) for y in grid]
            for i, x in enumerate(features)
        ]
        marginal = [scorer.score(x, y, us[i]) for i, (x, y) in enumerate(zip(features, labels))]
    else:
        rows = [[scorer.score(x, y) for y in grid] for x in features]
        marginal = [scorer.score(x, y) for x, y in zip(features, labels)]

    return ScoreMatrix(
        scores=np.asarray(rows, dtype=float),
        grid=np.asarray(grid),
        weights=w,
        marginal=np.asarray(marginal, dtype=float),
    )


def constant_predictor(value: float) -> Callable:
    """Predictor that ignores its input."""
    return lambda x: value


def least_squares_line(xs: Sequence[float], ys: Sequence[float]) -> Callable:
    """Closed-form one-dimensional least-squares fit."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need at least two paired observations")
    mx, my = x.mean(), y.mean()
    sxx = float(np.sum((x - mx) ** 2))
    slope = 0.0 if sxx == 0.0 else float(np.sum((x - mx) * (y - my)) / sxx)
    intercept = my - slope * mx
    return lambda t: slope * t + intercept


def majority_classifier(labels: Sequence) -> Callable:
    """Classifier that always predicts the most frequent training label."""
    if len(labels) == 0:
        raise ValueError("need at least one training label")
    uniq, counts = np.unique(np.asarray(labels), return_counts=True)
    winner = uniq[int(np.argmax(counts))]
    return lambda x: winner


def frequency_prob_model(labels: Sequence[int], num_labels: int) -> Callable:
    """Probability model from empirical label frequencies."""
    counts = np.bincount(np.asarray(labels, dtype=int), minlength=num_labels).astype(float)
    if counts.sum() == 0:
        raise ValueError("need at least one training label")
    probs = counts / counts.sum()
    return lambda x: probs
