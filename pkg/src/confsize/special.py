"""Numeric kernel: log-gamma, regularized incomplete beta, binomial and
beta-binomial distribution functions.

Every estimator in this package ultimately reduces to binomial CDF
evaluations, so these are kept scalar-exact (direct summation at small n)
and O(1) per query at large n (incomplete-beta identity).  All functions
are pure and safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

__all__ = [
    "BinomialQuery",
    "log_gamma",
    "regularized_incomplete_beta",
    "binomial_cdf",
    "binomial_cdf_grid",
    "beta_binomial_pmf",
    "beta_binomial_cdf",
    "beta_binomial_cdf_table",
]

# Direct summation is exact enough (and cheap) up to this trial count;
# beyond it the incomplete-beta identity keeps queries O(1).
_DIRECT_SUM_MAX_N = 64


@dataclass(frozen=True)
class BinomialQuery:
    """A binomial CDF evaluation point: P{B(trials, p) <= k}."""

    trials: int
    p: float
    k: int

    def __post_init__(self) -> None:
        if self.trials < 0:
            raise ValueError(f"trials must be >= 0, got {self.trials}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"success probability must lie in [0, 1], got {self.p}")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive real x."""
    if x <= 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b).

    I_0 = 0 and I_1 = 1; monotone non-decreasing in x.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return float(sps.betainc(a, b, x))


def _binomial_cdf_sum(n: int, p: float, k: int) -> float:
    # Exact binomial coefficients; float powers. Only used for n <= 64.
    q = 1.0 - p
    total = 0.0
    for j in range(k + 1):
        total += math.comb(n, j) * p**j * q ** (n - j)
    return min(total, 1.0)


def binomial_cdf(q: BinomialQuery) -> float:
    """P{B(n, p) <= k} for the given query.

    Uses direct summation for n <= 64 and the identity
    P{B(n, p) <= k} = I_{1-p}(n-k, k+1) otherwise.
    """
    n, p, k = q.trials, q.p, q.k
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    # Here 0 <= k < n, so n >= 1.
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    if n <= _DIRECT_SUM_MAX_N:
        return _binomial_cdf_sum(n, p, k)
    return float(sps.betainc(n - k, k + 1, 1.0 - p))


def binomial_cdf_grid(n: int, p: np.ndarray, k: int) -> np.ndarray:
    """Vectorized P{B(n, p_i) <= k} over an array of success probabilities.

    Matches `binomial_cdf` pointwise (same small-n/large-n split), which the
    integral engines rely on for bit-consistency with the scalar op.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("success probabilities must lie in [0, 1]")
    if k < 0:
        return np.zeros_like(p)
    if k >= n:
        return np.ones_like(p)
    if n <= _DIRECT_SUM_MAX_N:
        j = np.arange(k + 1)
        coef = np.array([math.comb(n, int(jj)) for jj in j], dtype=float)
        # (len(p), k+1) outer products; n <= 64 keeps this small.
        terms = coef * p[:, None] ** j * (1.0 - p)[:, None] ** (n - j)
        out = np.minimum(terms.sum(axis=1), 1.0)
    else:
        out = sps.betainc(n - k, k + 1, 1.0 - p)
    # p == 1 gives 0^0 terms in the summation path; pin the edge cases.
    out = np.where(p == 0.0, 1.0, out)
    out = np.where(p == 1.0, 0.0, out)
    return out


def _check_beta_params(a: float, b: float) -> None:
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"beta-binomial parameters must be positive, got a={a}, b={b}")


def beta_binomial_pmf(trials: int, a: float, b: float, k: int) -> float:
    """P{BetaBin(trials, a, b) = k}; zero outside 0 <= k <= trials."""
    _check_beta_params(a, b)
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    if k < 0 or k > trials:
        return 0.0
    log_pmf = (
        math.lgamma(trials + 1)
        - math.lgamma(k + 1)
        - math.lgamma(trials - k + 1)
        + sps.betaln(k + a, trials - k + b)
        - sps.betaln(a, b)
    )
    return float(math.exp(log_pmf))


def beta_binomial_cdf(trials: int, a: float, b: float, k: int) -> float:
    """P{BetaBin(trials, a, b) <= k}."""
    _check_beta_params(a, b)
    if k < 0:
        return 0.0
    if k >= trials:
        return 1.0
    return float(beta_binomial_cdf_table(trials, a, b)[k])


def beta_binomial_cdf_table(trials: int, a: float, b: float) -> np.ndarray:
    """CDF values P{BetaBin(trials, a, b) <= k} for k = 0..trials.

    Computed in one vectorized log-space pass; used for inverse-CDF
    sampling and the exact step-CDF of the synthetic score model.
    """
    _check_beta_params(a, b)
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    k = np.arange(trials + 1)
    log_pmf = (
        sps.gammaln(trials + 1)
        - sps.gammaln(k + 1)
        - sps.gammaln(trials - k + 1)
        + sps.betaln(k + a, trials - k + b)
        - sps.betaln(a, b)
    )
    cdf = np.cumsum(np.exp(log_pmf))
    return np.minimum(cdf, 1.0)
