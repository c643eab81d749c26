"""Split conformal mechanics: acceptance threshold, prediction sets, and
coverage trials.

The threshold is the ceil((1-alpha)(n+1))'th smallest value of the
calibration scores augmented with +inf; a label enters the prediction set
when its test score is at most the threshold (inclusive comparison).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ScoreSample",
    "Threshold",
    "n_alpha",
    "compute_threshold",
    "prediction_set_discrete",
    "coverage_trial",
]

# Absolute snap width for the rank computation: float rounding in
# (1-alpha)*(n+1) stays below ~1e-10 even at n ~ 1e6, while meaningful
# fractional parts of the product are never this small in practice.
_RANK_SNAP = 1e-9


@dataclass(frozen=True)
class ScoreSample:
    """Sorted non-conformity scores together with the score-space lower bound.

    `score_space_min` is the lower edge of the score space (0 for absolute
    residuals, -inf for signed scores such as quantile-interval losses).
    """

    scores: np.ndarray
    score_space_min: float = -math.inf

    def __post_init__(self) -> None:
        arr = np.asarray(self.scores, dtype=float)
        if arr.ndim != 1:
            raise ValueError("scores must be one-dimensional")
        if np.any(np.diff(arr) < 0):
            raise ValueError("scores must be sorted non-decreasing")
        if arr.size and arr[0] < self.score_space_min:
            raise ValueError(
                f"score {arr[0]} lies below the score-space lower bound "
                f"{self.score_space_min}"
            )
        object.__setattr__(self, "scores", arr)

    @classmethod
    def from_scores(
        cls, values: Iterable[float], score_space_min: float = -math.inf
    ) -> "ScoreSample":
        """Build a sample from unsorted values."""
        return cls(np.sort(np.asarray(list(values), dtype=float)), score_space_min)

    def __len__(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True)
class Threshold:
    """Acceptance threshold; +inf when the augmented infinity is selected."""

    value: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value) and self.value > 0

    def accepts(self, score: float) -> bool:
        # r <= +inf is true for every real r by convention.
        return score <= self.value


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def n_alpha(n: int, alpha: float) -> int:
    """ceil((1-alpha)(n+1)) - 1: the largest count of calibration scores
    allowed strictly below r while the threshold stays >= r."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_alpha(alpha)
    v = (1.0 - alpha) * (n + 1)
    # Snap products that are integers in exact arithmetic (e.g. 0.9 * 10).
    if abs(v - round(v)) < _RANK_SNAP:
        v = round(v)
    return math.ceil(v) - 1


def compute_threshold(cal: ScoreSample, alpha: float) -> Threshold:
    """Threshold over the augmented score set {R_1, ..., R_n, +inf}."""
    n = len(cal)
    if n == 0:
        raise ValueError("calibration sample is empty")
    rank = n_alpha(n, alpha) + 1  # 1-based rank into the augmented set
    if rank > n:
        return Threshold(math.inf)
    return Threshold(float(cal.scores[rank - 1]))


def prediction_set_discrete(
    threshold: Threshold, test_scores: Mapping[object, float]
) -> set:
    """Labels whose test score is at most the threshold."""
    return {y for y, r in test_scores.items() if threshold.accepts(r)}


def coverage_trial(
    cal_scores: ScoreSample | Iterable[float], test_score: float, alpha: float
) -> bool:
    """True when the test score falls inside the acceptance region."""
    if not isinstance(cal_scores, ScoreSample):
        cal_scores = ScoreSample.from_scores(cal_scores)
    return compute_threshold(cal_scores, alpha).accepts(test_score)
