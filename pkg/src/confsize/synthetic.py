"""Synthetic validation model: beta-binomial scores on a finite atom set.

The score space is m atoms r_1 < ... < r_m and a score equals r_I where
I - 1 follows BetaBin(m - 1, a, b), so the strictly-below CDF at each
atom is available in closed form.  Every quantity the estimators target
is therefore exactly computable, which makes this model the oracle for
the whole estimation pipeline.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .baselines import derive_rng, mc_sizes
from .conformal import ScoreSample
from .size import expected_size_discrete_exact
from .special import beta_binomial_cdf_table

__all__ = [
    "SyntheticConfig",
    "GridRecord",
    "CSV_COLUMNS",
    "exact_tilde_p",
    "theoretical_size",
    "sample_scores",
    "size_at_threshold",
    "empirical_tilde_at_atoms",
    "estimate_from_sample",
    "run_grid",
    "records_to_csv",
]

CSV_COLUMNS = [
    "a",
    "b",
    "m",
    "n",
    "alpha",
    "gamma",
    "repeat",
    "theoretical",
    "mc_avg",
    "point",
    "lower",
    "upper",
    "contains_truth",
]


@dataclass(frozen=True)
class SyntheticConfig:
    """Beta-binomial score model over m atoms with a constant factor weight."""

    m: int
    a: float
    b: float
    score_values: Optional[np.ndarray] = None
    weight: float = 2.0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"a and b must be positive, got a={self.a}, b={self.b}")
        if self.weight <= 0:
            raise ValueError(f"atom weight must be positive, got {self.weight}")
        if self.score_values is None:
            values = np.arange(1, self.m + 1, dtype=float)
        else:
            values = np.asarray(self.score_values, dtype=float)
            if values.shape != (self.m,):
                raise ValueError(f"need exactly m={self.m} score values")
            if np.any(np.diff(values) <= 0):
                raise ValueError("score values must be strictly increasing")
        object.__setattr__(self, "score_values", values)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.m, self.weight)

    def cdf_table(self) -> np.ndarray:
        return beta_binomial_cdf_table(self.m - 1, self.a, self.b)


def exact_tilde_p(config: SyntheticConfig) -> np.ndarray:
    """Strictly-below probabilities at each atom; the first is always 0."""
    table = config.cdf_table()
    out = np.empty(config.m)
    out[0] = 0.0
    out[1:] = table[: config.m - 1]
    return out


def theoretical_size(config: SyntheticConfig, n: int, alpha: float) -> float:
    """Exact expected prediction-set size for the synthetic model."""
    return expected_size_discrete_exact(
        exact_tilde_p(config), config.weights, n, alpha
    )


def sample_scores(
    config: SyntheticConfig, n: int, rng: np.random.Generator
) -> ScoreSample:
    """Draw n i.i.d. scores by inverse-CDF sampling over the atom indices."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    table = config.cdf_table()
    u = rng.random(n)
    idx = np.minimum(np.searchsorted(table, u, side="left"), config.m - 1)
    return ScoreSample.from_scores(config.score_values[idx], score_space_min=0.0)


def size_at_threshold(config: SyntheticConfig, threshold: float) -> float:
    """Exact marginal set size once the threshold is fixed: the weight
    mass of atoms at or below it."""
    count = int(np.searchsorted(config.score_values, threshold, side="right"))
    return config.weight * count


def empirical_tilde_at_atoms(
    config: SyntheticConfig, scores: np.ndarray
) -> np.ndarray:
    """Fraction of sampled scores strictly below each atom."""
    arr = np.sort(np.asarray(scores, dtype=float))
    below = np.searchsorted(arr, config.score_values, side="left")
    return below / arr.size


def estimate_from_sample(
    config: SyntheticConfig,
    scores: np.ndarray,
    n: int,
    alpha: float,
    gamma: Optional[float] = None,
) -> tuple[float, Optional[float], Optional[float]]:
    """Point (and interval, when gamma is given) estimate from one sample.

    The factor is fully known here, including its finite atom support, so
    the estimates are finite sums over all m atoms with the empirical
    strictly-below probabilities shifted by the DKW radius.
    """
    emp = empirical_tilde_at_atoms(config, scores)
    point = expected_size_discrete_exact(emp, config.weights, n, alpha)
    if gamma is None:
        return point, None, None
    k = np.asarray(scores).size
    delta = math.sqrt(math.log(2.0 / gamma) / (2.0 * k))
    lower = expected_size_discrete_exact(
        np.clip(emp + delta, 0.0, 1.0), config.weights, n, alpha
    )
    upper = expected_size_discrete_exact(
        np.clip(emp - delta, 0.0, 1.0), config.weights, n, alpha
    )
    return point, lower, upper


@dataclass(frozen=True)
class GridRecord:
    """One (cell, repeat, gamma) row of the validation experiment."""

    a: float
    b: float
    m: int
    n: int
    alpha: float
    gamma: float
    repeat: int
    theoretical: float
    mc_avg: float
    point: float
    lower: float
    upper: float
    contains_truth: bool
    mc_se: float  # not part of the CSV schema
    runs: int  # not part of the CSV schema


def _cell_records(
    cell_index: int,
    a: float,
    b: float,
    m: int,
    n: int,
    alpha: float,
    gamma_set: Sequence[float],
    runs: int,
    repeats: int,
    master_seed: int,
) -> list[GridRecord]:
    config = SyntheticConfig(m=m, a=a, b=b)
    theo = theoretical_size(config, n, alpha)

    def sampler(rng: np.random.Generator, count: int) -> np.ndarray:
        return sample_scores(config, count, rng).scores

    records = []
    for rep in range(repeats):
        sample = sample_scores(
            config, n, derive_rng(master_seed, cell_index, rep, 0)
        ).scores
        sizes = mc_sizes(
            sampler,
            lambda tau: size_at_threshold(config, tau),
            n,
            alpha,
            runs,
            (master_seed, cell_index, rep, 1),
        )
        mc_avg = float(sizes.mean())
        mc_se = float(sizes.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
        point, _, _ = estimate_from_sample(config, sample, n, alpha)
        for gamma in gamma_set:
            _, lower, upper = estimate_from_sample(config, sample, n, alpha, gamma)
            records.append(
                GridRecord(
                    a=a,
                    b=b,
                    m=m,
                    n=n,
                    alpha=alpha,
                    gamma=gamma,
                    repeat=rep,
                    theoretical=theo,
                    mc_avg=mc_avg,
                    point=point,
                    lower=lower,
                    upper=upper,
                    contains_truth=bool(lower <= theo <= upper),
                    mc_se=mc_se,
                    runs=runs,
                )
            )
    return records


def run_grid(
    a_set: Sequence[float],
    b_set: Sequence[float],
    m_set: Sequence[int],
    n_set: Sequence[int],
    gamma_set: Sequence[float],
    alpha: float = 0.1,
    runs_per_setting: int = 200,
    repeats: int = 10,
    master_seed: int = 0,
    threads: int = 1,
) -> list[GridRecord]:
    """Full validation sweep: theoretical vs MC vs point/interval estimates.

    Cells are independent with seeds derived per (cell, repeat), so the
    output is identical for any thread count; records come back in
    canonical (a, b, m, n) order with gammas innermost.
    """
    for name, values in (("a", a_set), ("b", b_set), ("m", m_set), ("n", n_set), ("gamma", gamma_set)):
        if len(values) == 0:
            raise ValueError(f"{name} set must be non-empty")
    cells = [
        (a, b, m, n)
        for a in sorted(a_set)
        for b in sorted(b_set)
        for m in sorted(m_set)
        for n in sorted(n_set)
    ]
    gammas = sorted(gamma_set, reverse=True)

    def work(item):
        ci, (a, b, m, n) = item
        return _cell_records(
            ci, a, b, m, n, alpha, gammas, runs_per_setting, repeats, master_seed
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, enumerate(cells)))
    else:
        chunks = [work(item) for item in enumerate(cells)]
    return [rec for chunk in chunks for rec in chunk]


def records_to_csv(records: Sequence[GridRecord], stream=None) -> Optional[str]:
    """Write records in the canonical CSV schema; returns a string when no
    stream is given."""
    own = stream is None
    if own:
        stream = io.StringIO()
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                repr(r.a),
                repr(r.b),
                r.m,
                r.n,
                repr(r.alpha),
                repr(r.gamma),
                r.repeat,
                repr(r.theoretical),
                repr(r.mc_avg),
                repr(r.point),
                repr(r.lower),
                repr(r.upper),
                int(r.contains_truth),
            ]
        )
    if own:
        return stream.getvalue()
    return None
