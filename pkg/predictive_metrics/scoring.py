"""
Test-set metrics. Reductions use math.fsum so results do not depend on the
order of the test points.
"""
import math
from typing import Optional

import numpy as np

from errors import PreconditionError
from .estimators import NoiseModel, PredictiveStats

PROB_FLOOR = 1e-12
LOG_2PI = math.log(2.0 * math.pi)


def _mean(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise PreconditionError("cannot average an empty set of values")
    return math.fsum(values) / values.size


def _paired(a, b, what: str):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[0] != b.shape[0]:
        raise PreconditionError(f"{what}: {a.shape[0]} values vs {b.shape[0]} targets")
    return a, b


def nll_gaussian_pointwise(y, stats: PredictiveStats, noise: Optional[NoiseModel] = None) -> np.ndarray:
    """Per-point NLL under N(mean, var + sigma2_noise), summed over outputs"""
    sigma2 = 0.0 if noise is None else noise.sigma2_noise
    mean = np.asarray(stats.mean, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(mean.shape)
    total = np.asarray(stats.var, dtype=np.float64) + sigma2
    if np.any(total <= 0):
        raise PreconditionError("total predictive variance must be positive")
    nll = 0.5 * (LOG_2PI + np.log(total)) + (y - mean) ** 2 / (2.0 * total)
    return nll.sum(axis=-1) if nll.ndim > 1 else nll.sum(keepdims=True)


def nll_gaussian(y, stats: PredictiveStats, noise: Optional[NoiseModel] = None) -> float:
    """Gaussian NLL averaged over test points"""
    return _mean(nll_gaussian_pointwise(y, stats, noise))


def rmse(predictions, targets) -> float:
    """Root mean squared error over every point and output"""
    predictions, targets = _paired(predictions, targets, 'rmse')
    targets = targets.reshape(predictions.shape)
    return math.sqrt(_mean((predictions - targets) ** 2))


def _labels(probs, labels):
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels).reshape(-1).astype(np.int64)
    if probs.ndim != 2 or probs.shape[0] != labels.shape[0]:
        raise PreconditionError(f"probabilities of shape {probs.shape} do not match {labels.shape[0]} labels")
    if np.any(labels < 0) or np.any(labels >= probs.shape[1]):
        raise PreconditionError(f"labels must lie in [0, {probs.shape[1]})")
    return probs, labels


def accuracy(probs, labels) -> float:
    probs, labels = _labels(probs, labels)
    return _mean(np.argmax(probs, axis=1) == labels)


def nll_classification(probs, labels) -> float:
    probs, labels = _labels(probs, labels)
    picked = probs[np.arange(labels.shape[0]), labels]
    return _mean(-np.log(np.maximum(picked, PROB_FLOOR)))


def interval_coverage(y, mean, var, z: float = 3.0) -> float:
    """Fraction of targets inside mean +- z * std"""
    mean, y = _paired(mean, y, 'interval_coverage')
    y = y.reshape(mean.shape)
    std = np.sqrt(np.asarray(var, dtype=np.float64).reshape(mean.shape))
    return _mean(np.abs(y - mean) <= z * std)
