"""Expected prediction-set size for split conformal prediction.

Exact quantification of the expected set size from the calibration score
distribution, practical point and high-probability interval estimates
from a single accessible sample, and the Monte Carlo / concentration
baselines they replace.
"""

from .conformal import (
    ScoreSample,
    Threshold,
    compute_threshold,
    coverage_trial,
    n_alpha,
    prediction_set_discrete,
)
from .factors import (
    FactorSpec,
    FactorSupport,
    UnknownFactorError,
    factor_antiderivative,
    factor_support,
    factor_value,
    format_factor,
    parse_factor,
)
from .size import (
    SizeQuery,
    StepTildeCdf,
    conditional_size_given_calibration,
    conditional_size_given_feature,
    expected_size_discrete_exact,
    expected_size_from_tail,
    expected_size_step,
    expected_size_unknown_factor,
)
from .estimators import (
    DkwRadius,
    EstimateMeta,
    SizeEstimate,
    conditional_point_estimate_feature,
    dkw_radius,
    empirical_tilde_cdf,
    interval_estimate_known,
    interval_estimate_unknown,
    point_estimate_known,
    point_estimate_unknown,
)
from .baselines import (
    ConcentrationInterval,
    SizeSampleSet,
    bernstein_interval,
    clt_interval,
    derive_rng,
    hoeffding_interval,
    mc_average,
    mc_sizes,
    same_data_mc,
)
from .scorers import (
    ApsScorer,
    CqrScorer,
    L1Scorer,
    LacScorer,
    LpScorer,
    ScoreMatrix,
    ZeroOneScorer,
    aps_score,
    build_score_matrix,
    constant_predictor,
    cqr_score,
    frequency_prob_model,
    l1_score,
    lac_score,
    least_squares_line,
    lp_score,
    majority_classifier,
    trapezoid_weights,
    zero_one_score,
)
from .synthetic import (
    GridRecord,
    SyntheticConfig,
    estimate_from_sample,
    exact_tilde_p,
    records_to_csv,
    run_grid,
    sample_scores,
    size_at_threshold,
    theoretical_size,
)
from .special import (
    BinomialQuery,
    beta_binomial_cdf,
    beta_binomial_pmf,
    binomial_cdf,
    log_gamma,
    regularized_incomplete_beta,
)

__version__ = "0.1.0"

__all__ = [
    "ScoreSample",
    "Threshold",
    "n_alpha",
    "compute_threshold",
    "prediction_set_discrete",
    "coverage_trial",
    "FactorSpec",
    "FactorSupport",
    "UnknownFactorError",
    "factor_value",
    "factor_antiderivative",
    "factor_support",
    "parse_factor",
    "format_factor",
    "StepTildeCdf",
    "SizeQuery",
    "expected_size_step",
    "expected_size_from_tail",
    "expected_size_discrete_exact",
    "expected_size_unknown_factor",
    "conditional_size_given_feature",
    "conditional_size_given_calibration",
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
    "ConcentrationInterval",
    "SizeSampleSet",
    "derive_rng",
    "mc_sizes",
    "mc_average",
    "same_data_mc",
    "clt_interval",
    "hoeffding_interval",
    "bernstein_interval",
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
    "SyntheticConfig",
    "GridRecord",
    "exact_tilde_p",
    "theoretical_size",
    "sample_scores",
    "size_at_threshold",
    "estimate_from_sample",
    "run_grid",
    "records_to_csv",
    "BinomialQuery",
    "log_gamma",
    "regularized_incomplete_beta",
    "binomial_cdf",
    "beta_binomial_pmf",
    "beta_binomial_cdf",
]
