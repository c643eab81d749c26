"""Threshold, prediction-set, and coverage behavior."""

import math

import numpy as np
import pytest

from confsize.conformal import (
    ScoreSample,
    Threshold,
    compute_threshold,
    coverage_trial,
    n_alpha,
    prediction_set_discrete,
)


class TestNAlpha:
    @pytest.mark.parametrize(
        "n,alpha,expected",
        [(100, 0.1, 90), (4, 0.5, 2), (9, 0.1, 8), (99, 0.1, 89), (1, 0.4, 1)],
    )
    def test_values(self, n, alpha, expected):
        assert n_alpha(n, alpha) == expected

    def test_range(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = int(rng.integers(1, 5000))
            alpha = float(rng.uniform(0.001, 0.999))
            na = n_alpha(n, alpha)
            assert 0 <= na <= n

    def test_float_rank_rounding(self):
        # products that are integers in exact arithmetic must not ceil up
        for n, alpha in [(9, 0.1), (99, 0.1), (19, 0.05), (3, 0.25), (999, 0.1)]:
            exact = (1 - alpha) * (n + 1)
            assert n_alpha(n, alpha) == round(exact) - 1

    def test_domain(self):
        with pytest.raises(ValueError):
            n_alpha(0, 0.1)
        with pytest.raises(ValueError):
            n_alpha(10, 0.0)
        with pytest.raises(ValueError):
            n_alpha(10, 1.0)


class TestThreshold:
    def test_order_statistic(self):
        sample = ScoreSample.from_scores([1, 2, 3, 4])
        assert compute_threshold(sample, 0.5).value == 3.0

    def test_augmented_infinity(self):
        sample = ScoreSample.from_scores([1, 2, 3, 4])
        assert compute_threshold(sample, 0.1).is_infinite
        single = ScoreSample.from_scores([7.0])
        assert compute_threshold(single, 0.4).is_infinite

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compute_threshold(ScoreSample.from_scores([]), 0.5)

    def test_ties_kept(self):
        sample = ScoreSample.from_scores([2, 2, 2, 5])
        assert compute_threshold(sample, 0.5).value == 2.0

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            sample = ScoreSample.from_scores(rng.normal(size=int(rng.integers(1, 40))))
            a1, a2 = sorted(rng.uniform(0.01, 0.99, size=2))
            t1 = compute_threshold(sample, a1).value
            t2 = compute_threshold(sample, a2).value
            assert t1 >= t2


class TestPredictionSet:
    def test_inclusive_comparison(self):
        got = prediction_set_discrete(Threshold(3.0), {"a": 2.0, "b": 3.0, "c": 5.0})
        assert got == {"a", "b"}

    def test_infinite_threshold_includes_all(self):
        scores = {"a": 2.0, "b": 1e18, "c": -4.0}
        assert prediction_set_discrete(Threshold(math.inf), scores) == set(scores)

    def test_zero_threshold(self):
        assert prediction_set_discrete(Threshold(0.0), {"a": 0.5, "b": 1.0}) == set()

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            scores = {i: float(v) for i, v in enumerate(rng.normal(size=12))}
            t1, t2 = sorted(rng.normal(size=2))
            assert prediction_set_discrete(Threshold(t1), scores) <= (
                prediction_set_discrete(Threshold(t2), scores)
            )


class TestCoverage:
    def test_examples(self):
        cal = list(range(1, 10))
        assert coverage_trial(cal, 5.0, 0.1) is True
        assert coverage_trial(cal, 9.5, 0.1) is False
        assert coverage_trial([1, 2, 3, 4], 100.0, 0.1) is True

    def test_marginal_miscoverage_band(self):
        # continuous scores, n = 99, alpha = 0.1: exact miscoverage is
        # 1 - 90/100 = 0.10, and validity forces it <= alpha.
        n, alpha, trials = 99, 0.1, 10_000
        rng = np.random.default_rng(20240)
        misses = 0
        for _ in range(trials):
            draws = rng.random(n + 1)
            if not coverage_trial(draws[:n], draws[n], alpha):
                misses += 1
        freq = misses / trials
        slack = 3.0 * math.sqrt(alpha * (1 - alpha) / trials)
        assert alpha - 1.0 / (n + 1) - slack <= freq <= alpha + slack


class TestScoreSample:
    def test_sorted_and_bounded(self):
        with pytest.raises(ValueError):
            ScoreSample(np.array([3.0, 1.0]))
        with pytest.raises(ValueError):
            ScoreSample(np.array([-1.0, 2.0]), score_space_min=0.0)

    def test_from_scores_sorts(self):
        s = ScoreSample.from_scores([3.0, 1.0, 2.0])
        assert list(s.scores) == [1.0, 2.0, 3.0]
        assert len(s) == 3
