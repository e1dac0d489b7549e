"""
Monte Carlo predictive moments and the homoscedastic noise model
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import PreconditionError, UnsupportedHeadError
from marginals import ParamSample, apply_mask
from nn_core import ModelSpec, forward

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-6


@dataclass(frozen=True)
class PredictiveStats:
    """
    mean/var have shape (m,) for a single input or (B, m) for a batch.
    probs is the averaged class-probability vector of classifiers.
    """
    mean: np.ndarray
    var: np.ndarray
    K: int
    probs: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.shape(self.mean) != np.shape(self.var):
            raise PreconditionError(f"mean and var shapes differ: {np.shape(self.mean)} vs {np.shape(self.var)}")
        if np.any(np.asarray(self.var) < 0):
            raise PreconditionError("predictive variance must be nonnegative")

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.var)


@dataclass(frozen=True)
class NoiseModel:
    sigma2_noise: float

    def __post_init__(self):
        if not (self.sigma2_noise >= 0 and math.isfinite(self.sigma2_noise)):
            raise PreconditionError(f"noise variance must be finite and nonnegative, got {self.sigma2_noise}")


def sample_outputs(spec: ModelSpec, samples: Sequence[ParamSample], x) -> np.ndarray:
    """Stacked network outputs, one slice per sample (masked forward when a mask is present)"""
    if len(samples) == 0:
        raise PreconditionError("predictive_mc needs at least one parameter sample")
    return np.stack([forward(spec, apply_mask(sample[0], sample[1]), x) for sample in samples])


def moments_over_samples(outputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean and population variance along axis 0, computed on deviations from
    the first sample so identical samples give exactly zero variance.
    """
    reference = outputs[0]
    deviations = outputs - reference
    shift = deviations.mean(axis=0)
    mean = reference + shift
    var = np.mean((deviations - shift) ** 2, axis=0)
    return mean, var


def stats_from_outputs(outputs: np.ndarray, classifier: bool = False) -> PredictiveStats:
    if outputs.shape[0] == 0:
        raise PreconditionError("predictive moments need at least one sample")
    mean, var = moments_over_samples(outputs)
    return PredictiveStats(mean=mean, var=var, K=int(outputs.shape[0]), probs=mean if classifier else None)


def predictive_mc(spec: ModelSpec, samples: Sequence[ParamSample], x) -> PredictiveStats:
    """Monte Carlo mean and variance of the network output over samples"""
    return stats_from_outputs(sample_outputs(spec, samples, x), spec.is_classifier)


def noise_from_mean(Y, mean, noise_floor: float = NOISE_FLOOR) -> NoiseModel:
    """Mean squared residual of a predictive mean, floored at noise_floor"""
    mean = np.asarray(mean, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64).reshape(mean.shape)
    if Y.size == 0:
        raise PreconditionError("fit_noise needs a nonempty training set")
    residual2 = ((Y - mean) ** 2).ravel()
    sigma2 = max(math.fsum(residual2) / residual2.size, noise_floor)
    logger.debug(f"fitted observation noise variance {sigma2:.6g}")
    return NoiseModel(sigma2)


def fit_noise(spec: ModelSpec, samples: Sequence[ParamSample], train_data,
              noise_floor: float = NOISE_FLOOR) -> NoiseModel:
    if spec.is_classifier:
        raise UnsupportedHeadError("observation noise is only defined for regression heads")
    if np.shape(train_data.X)[0] == 0:
        raise PreconditionError("fit_noise needs a nonempty training set")
    stats = predictive_mc(spec, samples, train_data.X)
    return noise_from_mean(train_data.Y, stats.mean, noise_floor)


def to_original_units(stats: PredictiveStats, noise: NoiseModel, standardizer) -> Tuple[PredictiveStats, NoiseModel]:
    """
    Map standardized regression moments back to target units using the
    target scaler: mean * s + c, variances times s^2.
    """
    shift = np.asarray(standardizer.y_mean, dtype=np.float64)
    scale = np.asarray(standardizer.y_std, dtype=np.float64)
    mean = stats.mean * scale + shift
    var = stats.var * scale ** 2
    noise_var = noise.sigma2_noise * scale ** 2
    if noise_var.size != 1:
        raise UnsupportedHeadError("a single noise variance needs a single target column")
    return PredictiveStats(mean=mean, var=var, K=stats.K), NoiseModel(float(noise_var.reshape(-1)[0]))


def mixture_moments(means: Sequence[np.ndarray], variances: Sequence[np.ndarray]) -> PredictiveStats:
    """Moments of an equally weighted Gaussian mixture (law of total variance)"""
    if len(means) == 0 or len(means) != len(variances):
        raise PreconditionError("mixture_moments needs equally many (>= 1) means and variances")
    means = np.stack([np.asarray(m, dtype=np.float64) for m in means])
    variances = np.stack([np.asarray(v, dtype=np.float64) for v in variances])
    mean, spread = moments_over_samples(means)
    return PredictiveStats(mean=mean, var=variances.mean(axis=0) + spread, K=means.shape[0])
