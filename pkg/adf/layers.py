"""
Moment matching through probabilistic linear and ReLU layers.

Units are treated as independent Gaussians; weights, biases and inputs are
mutually independent. Every quantity stored here is a variance.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
from scipy.special import ndtr
from scipy.stats import norm

from errors import InputShapeError, PreconditionError

logger = logging.getLogger(__name__)

SIGMA_EPS = 1e-12


@dataclass(frozen=True)
class GaussianMoments:
    """Per-unit mean and variance; shape (n,) or (B, n)"""
    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        var = np.asarray(self.var, dtype=np.float64)
        if mean.shape != var.shape:
            raise InputShapeError(f"mean and var shapes differ: {mean.shape} vs {var.shape}")
        if np.any(var < 0):
            raise PreconditionError("variances must be nonnegative")
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'var', var)

    @classmethod
    def deterministic(cls, x) -> 'GaussianMoments':
        x = np.asarray(x, dtype=np.float64)
        return cls(x, np.zeros_like(x))

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.var)


class LayerMoments(NamedTuple):
    w_mean: np.ndarray
    w_var: np.ndarray
    b_mean: np.ndarray
    b_var: np.ndarray


def adf_linear(inp: GaussianMoments, layer: LayerMoments) -> GaussianMoments:
    """
    mean = E[W] E[X] + E[B]
    var  = sum_j Var[W]Var[X] + Var[W]E[X]^2 + E[W]^2 Var[X], plus Var[B]
    """
    w_mean, w_var, b_mean, b_var = layer
    if w_mean.shape != w_var.shape or b_mean.shape != b_var.shape or b_mean.shape[0] != w_mean.shape[0]:
        raise InputShapeError("inconsistent layer moment shapes")
    if inp.mean.shape[-1] != w_mean.shape[1]:
        raise InputShapeError(f"layer expects {w_mean.shape[1]} inputs, got {inp.mean.shape[-1]}")
    mean = inp.mean @ w_mean.T + b_mean
    var = inp.var @ (w_var + w_mean ** 2).T + (inp.mean ** 2) @ w_var.T + b_var
    return GaussianMoments(mean, np.maximum(var, 0.0))


def relu_moments(mu, var) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed-form mean and variance of max(0, Z), Z ~ N(mu, var), var > 0,
    before any clamping. With r = mu / sigma:
        mean = mu Phi(r) + sigma phi(r)
        var  = (mu^2 + sigma^2) Phi(r) + mu sigma phi(r) - mean^2
    """
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.sqrt(np.asarray(var, dtype=np.float64))
    safe_sigma = np.where(sigma > 0, sigma, 1.0)
    r = mu / safe_sigma
    cdf = ndtr(r)
    pdf = norm.pdf(r)
    mean = mu * cdf + safe_sigma * pdf
    second = (mu ** 2 + safe_sigma ** 2) * cdf + mu * safe_sigma * pdf
    return mean, second - mean ** 2


def adf_relu(inp: GaussianMoments, sigma_eps: float = SIGMA_EPS) -> GaussianMoments:
    """ReLU moments; units with sigma below sigma_eps pass as max(0, mu) with zero variance"""
    mu = inp.mean
    mean, var = relu_moments(mu, inp.var)
    deterministic = inp.std < sigma_eps
    floor = np.maximum(mu, 0.0)
    mean = np.where(deterministic, floor, np.maximum(mean, floor))
    var = np.where(deterministic, 0.0, np.maximum(var, 0.0))
    return GaussianMoments(mean, var)
