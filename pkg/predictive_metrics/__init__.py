from .estimators import (
    NOISE_FLOOR,
    NoiseModel,
    PredictiveStats,
    fit_noise,
    mixture_moments,
    moments_over_samples,
    noise_from_mean,
    predictive_mc,
    sample_outputs,
    stats_from_outputs,
    to_original_units,
)
from .scoring import (
    PROB_FLOOR,
    accuracy,
    interval_coverage,
    nll_classification,
    nll_gaussian,
    nll_gaussian_pointwise,
    rmse,
)

__all__ = [
    'NOISE_FLOOR',
    'NoiseModel',
    'PredictiveStats',
    'fit_noise',
    'mixture_moments',
    'moments_over_samples',
    'noise_from_mean',
    'predictive_mc',
    'sample_outputs',
    'stats_from_outputs',
    'to_original_units',
    'PROB_FLOOR',
    'accuracy',
    'interval_coverage',
    'nll_classification',
    'nll_gaussian',
    'nll_gaussian_pointwise',
    'rmse',
]
