"""Monte Carlo averaging and concentration-interval baselines.

These are the procedures the direct estimators replace: repeatedly run
the conformal construction and average the realized set sizes, then wrap
the i.i.d. sizes in CLT / Hoeffding / empirical-Bernstein intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import ndtri

from .conformal import ScoreSample, compute_threshold

__all__ = [
    "SizeSampleSet",
    "ConcentrationInterval",
    "derive_rng",
    "mc_sizes",
    "mc_average",
    "same_data_mc",
    "clt_interval",
    "hoeffding_interval",
    "bernstein_interval",
]


def derive_rng(*parts: int) -> np.random.Generator:
    """Counter-style rng derivation: identical streams for identical parts."""
    return np.random.default_rng(np.random.SeedSequence(list(parts)))


@dataclass(frozen=True)
class SizeSampleSet:
    """I.i.d. prediction-set sizes, with the label-measure bound when known."""

    sizes: np.ndarray
    bound: Optional[float] = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.sizes, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("sizes must be a non-empty vector")
        if np.any(arr < 0):
            raise ValueError("set sizes cannot be negative")
        if self.bound is not None and np.any(arr > self.bound):
            raise ValueError("a size exceeds the declared bound")
        object.__setattr__(self, "sizes", arr)


@dataclass(frozen=True)
class ConcentrationInterval:
    """Symmetric-about-the-mean interval, clipped to the feasible range."""

    lower: float
    upper: float
    lower_unclipped: float
    upper_unclipped: float
    gamma: float
    method: str
    heuristic: bool = False

    def __iter__(self):
        yield self.lower
        yield self.upper

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def mc_sizes(
    score_sampler: Callable[[np.random.Generator, int], np.ndarray],
    size_of_threshold: Callable[[float], float],
    n: int,
    alpha: float,
    runs: int,
    seed,
) -> np.ndarray:
    """Realized set sizes over independent conformal runs.

    Each run draws n calibration scores, computes the threshold, and
    records the exact marginal set size at that threshold.  Per-run rngs
    are derived from the seed by a counter scheme, so results do not
    depend on execution order.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    seed_parts = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    out = np.empty(runs)
    for i in range(runs):
        rng = derive_rng(*seed_parts, i)
        scores = np.asarray(score_sampler(rng, n), dtype=float)
        tau = compute_threshold(ScoreSample.from_scores(scores), alpha)
        out[i] = size_of_threshold(tau.value)
    return out


def mc_average(
    score_sampler: Callable[[np.random.Generator, int], np.ndarray],
    size_of_threshold: Callable[[float], float],
    n: int,
    alpha: float,
    runs: int,
    seed,
) -> float:
    """Monte Carlo average of realized set sizes; deterministic per seed."""
    return float(mc_sizes(score_sampler, size_of_threshold, n, alpha, runs, seed).mean())


def same_data_mc(
    scores: Sequence[float],
    size_of_threshold: Callable[[float], float],
    alpha: float,
    seed,
    test_rows: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None,
    n_cal: Optional[int] = None,
) -> float:
    """Single-sample Monte Carlo: split the accessible points in half.

    Half the points act as pseudo-calibration, the rest as pseudo-test.
    With `test_rows` (per-point scores over a label grid) each pseudo-test
    point contributes its own thresholded row size; otherwise the exact
    marginal size at the threshold is used for every test point.
    """
    arr = np.asarray(scores, dtype=float)
    k = arr.size
    if k < 2:
        raise ValueError(f"same-data MC needs k >= 2 points, got {k}")
    if n_cal is None:
        n_cal = k // 2
    if not 1 <= n_cal < k:
        raise ValueError(f"pseudo-calibration size must lie in [1, {k - 1}]")

    seed_parts = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    rng = derive_rng(*seed_parts)
    perm = rng.permutation(k)
    cal_idx, test_idx = perm[:n_cal], perm[n_cal:]
    tau = compute_threshold(ScoreSample.from_scores(arr[cal_idx]), alpha)

    if test_rows is not None:
        rows = np.asarray(test_rows, dtype=float)
        if rows.shape[0] != k:
            raise ValueError("need one test row per accessible point")
        w = np.ones(rows.shape[1]) if weights is None else np.asarray(weights, dtype=float)
        sizes = (rows[test_idx] <= tau.value) @ w
        return float(sizes.mean())
    return float(size_of_threshold(tau.value))


def clt_interval(samples: SizeSampleSet, gamma: float) -> ConcentrationInterval:
    """Asymptotic normal interval: mean +/- z_{1-gamma/2} s / sqrt(N)."""
    _check_gamma(gamma)
    sizes = samples.sizes
    if sizes.size < 2:
        raise ValueError("CLT interval needs at least two samples")
    mean = float(sizes.mean())
    s = float(sizes.std(ddof=1))
    half = float(ndtri(1.0 - gamma / 2.0)) * s / math.sqrt(sizes.size)
    return _clipped(mean, half, samples.bound, gamma, "clt", heuristic=True)


def hoeffding_interval(samples: SizeSampleSet, gamma: float) -> ConcentrationInterval:
    """Finite-sample interval mean +/- B sqrt(ln(2/gamma) / (2N))."""
    _check_gamma(gamma)
    if samples.bound is None:
        raise ValueError(
            "Hoeffding interval needs a size bound; unavailable for regression"
        )
    sizes = samples.sizes
    mean = float(sizes.mean())
    half = samples.bound * math.sqrt(math.log(2.0 / gamma) / (2.0 * sizes.size))
    return _clipped(mean, half, samples.bound, gamma, "hoeffding")


def bernstein_interval(samples: SizeSampleSet, gamma: float) -> ConcentrationInterval:
    """Empirical-Bernstein interval using the sample variance.

    Half-width sqrt(2 s^2 ln(3/gamma) / N) + 3 B ln(3/gamma) / N; since
    the variance is itself estimated, this is flagged heuristic.
    """
    _check_gamma(gamma)
    if samples.bound is None:
        raise ValueError(
            "Bernstein interval needs a size bound; unavailable for regression"
        )
    sizes = samples.sizes
    if sizes.size < 2:
        raise ValueError("Bernstein interval needs at least two samples")
    mean = float(sizes.mean())
    s2 = float(sizes.var(ddof=1))
    log_term = math.log(3.0 / gamma)
    half = math.sqrt(2.0 * s2 * log_term / sizes.size) + 3.0 * samples.bound * log_term / sizes.size
    return _clipped(mean, half, samples.bound, gamma, "bernstein", heuristic=True)


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")


def _clipped(
    mean: float,
    half: float,
    bound: Optional[float],
    gamma: float,
    method: str,
    heuristic: bool = False,
) -> ConcentrationInterval:
    lo_raw, up_raw = mean - half, mean + half
    top = bound if bound is not None else math.inf
    return ConcentrationInterval(
        lower=max(lo_raw, 0.0),
        upper=min(up_raw, top),
        lower_unclipped=lo_raw,
        upper_unclipped=up_raw,
        gamma=gamma,
        method=method,
        heuristic=heuristic,
    )
