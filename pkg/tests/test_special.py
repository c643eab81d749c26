"""Numeric kernel tests: exact known values, independent oracles, and
distribution-function invariants."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.stats import betabinom

from confsize.special import (
    BinomialQuery,
    beta_binomial_cdf,
    beta_binomial_cdf_table,
    beta_binomial_pmf,
    binomial_cdf,
    binomial_cdf_grid,
    log_gamma,
    regularized_incomplete_beta,
)


def exact_binomial_cdf(n: int, p: float, k: int) -> Fraction:
    """Direct-summation oracle in exact rational arithmetic."""
    if k < 0:
        return Fraction(0)
    fp = Fraction(p)
    return sum(
        Fraction(math.comb(n, j)) * fp**j * (1 - fp) ** (n - j)
        for j in range(min(k, n) + 1)
    )


class TestLogGamma:
    def test_known_values(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
        assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-14)
        assert log_gamma(6.0) == pytest.approx(math.log(120.0), abs=1e-13)

    def test_integer_factorials_across_range(self):
        # ln((x-1)!) computed from exact integers is the oracle.
        for x in range(2, 171):
            expected = math.log(math.factorial(x - 1))
            assert abs(log_gamma(float(x)) - expected) <= 1e-12

    def test_half_integers(self):
        # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
        for n in range(0, 80):
            expected = (
                math.log(math.factorial(2 * n))
                + 0.5 * math.log(math.pi)
                - n * math.log(4.0)
                - math.log(math.factorial(n))
            )
            assert abs(log_gamma(n + 0.5) - expected) <= 1e-12 * max(1.0, abs(expected))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            log_gamma(0.0)
        with pytest.raises(ValueError):
            log_gamma(-3.0)


class TestRegularizedIncompleteBeta:
    def test_boundaries_and_uniform(self):
        assert regularized_incomplete_beta(2.0, 5.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 5.0, 1.0) == 1.0
        assert regularized_incomplete_beta(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-14)

    def test_hand_expanded_polynomial(self):
        # I_x(2, 3) = x^2 (6 - 8x + 3x^2)
        x = 0.5
        assert regularized_incomplete_beta(2.0, 3.0, x) == pytest.approx(
            x**2 * (6 - 8 * x + 3 * x**2), abs=1e-14
        )

    def test_monotone_in_x(self):
        xs = np.linspace(0, 1, 101)
        vals = [regularized_incomplete_beta(2.5, 0.7, x) for x in xs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_against_quadrature(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            a = rng.uniform(0.2, 8.0)
            b = rng.uniform(0.2, 8.0)
            x = rng.uniform(0.0, 1.0)
            norm, _ = integrate.quad(
                lambda t: t ** (a - 1) * (1 - t) ** (b - 1),
                0.0, 1.0, epsabs=1e-13, epsrel=1e-13,
            )
            num, _ = integrate.quad(
                lambda t: t ** (a - 1) * (1 - t) ** (b - 1),
                0.0, x, epsabs=1e-13, epsrel=1e-13,
            )
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                num / norm, abs=1e-10
            )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(2.0, 3.0, 1.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(-1.0, 3.0, 0.5)


class TestBinomialCdf:
    def test_examples(self):
        assert binomial_cdf(BinomialQuery(2, 0.5, 1)) == pytest.approx(0.75, abs=1e-15)
        assert binomial_cdf(BinomialQuery(5, 0.0, 0)) == 1.0
        assert binomial_cdf(BinomialQuery(5, 1.0, 4)) == 0.0

    def test_edges(self):
        assert binomial_cdf(BinomialQuery(4, 0.3, -1)) == 0.0
        assert binomial_cdf(BinomialQuery(4, 0.3, 4)) == 1.0
        assert binomial_cdf(BinomialQuery(4, 0.3, 9)) == 1.0
        assert binomial_cdf(BinomialQuery(0, 0.5, 0)) == 1.0

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            BinomialQuery(4, 1.2, 2)

    @pytest.mark.parametrize("n", [1, 7, 30])
    def test_exact_summation_oracle_small_n(self, n):
        for p in np.linspace(0.0, 1.0, 21):
            for k in range(-1, n + 1):
                got = binomial_cdf(BinomialQuery(n, float(p), k))
                want = float(exact_binomial_cdf(n, float(p), k))
                assert abs(got - want) <= 1e-12

    def test_incomplete_beta_path_matches_summation(self):
        # n = 100 exercises the betainc identity; the rational-arithmetic
        # summation stays the oracle.
        n = 100
        for p in [0.05, 0.3, 0.5, 0.77, 0.95]:
            for k in [0, 10, 50, 90, 99]:
                got = binomial_cdf(BinomialQuery(n, p, k))
                want = float(exact_binomial_cdf(n, p, k))
                assert abs(got - want) <= 1e-12

    @given(
        n=st.integers(min_value=1, max_value=200),
        k=st.integers(min_value=0, max_value=200),
        p=st.tuples(
            st.floats(min_value=0.0, max_value=1.0),
            st.floats(min_value=0.0, max_value=1.0),
        ),
    )
    @settings(max_examples=100, derandomize=True)
    def test_non_increasing_in_p(self, n, k, p):
        p_lo, p_hi = sorted(p)
        lo = binomial_cdf(BinomialQuery(n, p_hi, k))
        hi = binomial_cdf(BinomialQuery(n, p_lo, k))
        assert lo <= hi + 1e-12

    def test_grid_matches_scalar(self):
        rng = np.random.default_rng(3)
        for n in [3, 40, 200]:
            p = rng.random(50)
            for k in [-1, 0, n // 2, n]:
                grid = binomial_cdf_grid(n, p, k)
                scalars = [binomial_cdf(BinomialQuery(n, float(pi), k)) for pi in p]
                np.testing.assert_allclose(grid, scalars, atol=1e-14)


class TestBetaBinomial:
    def test_uniform_case(self):
        # a = b = 1 is uniform over {0..trials}
        assert beta_binomial_pmf(4, 1.0, 1.0, 2) == pytest.approx(0.2, abs=1e-14)
        assert beta_binomial_cdf(4, 1.0, 1.0, 1) == pytest.approx(0.4, abs=1e-14)

    def test_hand_derived(self):
        # B(3,2)/B(2,2) = (1/12)/(1/6)
        assert beta_binomial_pmf(1, 2.0, 2.0, 1) == pytest.approx(0.5, abs=1e-14)

    def test_outside_support(self):
        assert beta_binomial_pmf(3, 1.0, 1.0, 5) == 0.0
        assert beta_binomial_pmf(3, 1.0, 1.0, -1) == 0.0
        assert beta_binomial_cdf(9, 2.0, 3.0, -1) == 0.0
        assert beta_binomial_cdf(3, 2.0, 5.0, 3) == 1.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            beta_binomial_pmf(3, 0.0, 1.0, 1)
        with pytest.raises(ValueError):
            beta_binomial_cdf(3, 1.0, -2.0, 1)

    @given(
        trials=st.integers(min_value=0, max_value=60),
        a=st.floats(min_value=0.05, max_value=20.0),
        b=st.floats(min_value=0.05, max_value=20.0),
    )
    @settings(max_examples=100, derandomize=True)
    def test_pmf_sums_to_one(self, trials, a, b):
        total = math.fsum(beta_binomial_pmf(trials, a, b, k) for k in range(trials + 1))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_against_scipy(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            trials = int(rng.integers(1, 200))
            a = float(rng.uniform(0.0625, 16.0))
            b = float(rng.uniform(0.0625, 16.0))
            k = int(rng.integers(0, trials + 1))
            assert beta_binomial_pmf(trials, a, b, k) == pytest.approx(
                betabinom.pmf(k, trials, a, b), abs=1e-12
            )
            assert beta_binomial_cdf(trials, a, b, k) == pytest.approx(
                betabinom.cdf(k, trials, a, b), abs=1e-11
            )

    def test_cdf_table(self):
        table = beta_binomial_cdf_table(9, 0.25, 4.0)
        assert table.shape == (10,)
        assert np.all(np.diff(table) >= -1e-15)
        assert table[-1] == pytest.approx(1.0, abs=1e-12)
        for k in range(10):
            assert table[k] == pytest.approx(
                beta_binomial_cdf(9, 0.25, 4.0, k), abs=1e-14
            )
