"""
Single-pass predictive moments of a regression network with Gaussian
parameters. Dropout plays no part here: masks are fixed to ones.
"""
import logging
from dataclasses import dataclass
from typing import List, Union

import numpy as np

from errors import InputShapeError, PreconditionError, UnsupportedHeadError
from nn_core import Activation, ModelSpec, layer_slices, param_dim
from .layers import GaussianMoments, LayerMoments, adf_linear, adf_relu

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParamMoments:
    mean: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        var = np.asarray(self.var, dtype=np.float64)
        if mean.ndim != 1 or mean.shape != var.shape:
            raise InputShapeError(f"parameter mean and var must be vectors of equal length, got {mean.shape}, {var.shape}")
        if np.any(var < 0):
            raise PreconditionError("parameter variances must be nonnegative")
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'var', var)

    @classmethod
    def from_posterior(cls, post) -> 'ParamMoments':
        return cls(post.mean, post.var)

    @classmethod
    def point(cls, theta) -> 'ParamMoments':
        theta = np.asarray(theta, dtype=np.float64)
        return cls(theta, np.zeros_like(theta))

    def layers(self, spec: ModelSpec) -> List[LayerMoments]:
        if self.mean.shape[0] != param_dim(spec):
            raise InputShapeError(f"parameter moments have length {self.mean.shape[0]}, model needs {param_dim(spec)}")
        return [
            LayerMoments(
                self.mean[s.weights].reshape(s.weight_shape),
                self.var[s.weights].reshape(s.weight_shape),
                self.mean[s.bias],
                self.var[s.bias],
            )
            for s in layer_slices(spec)
        ]


def adf_forward(spec: ModelSpec, params: ParamMoments,
                inp: Union[GaussianMoments, np.ndarray]) -> GaussianMoments:
    """
    Alternate adf_linear and adf_relu through the network and return the
    output-layer moments. A plain array input is treated as deterministic.
    """
    if spec.is_classifier:
        raise UnsupportedHeadError("moment propagation supports regression heads only")
    if not isinstance(inp, GaussianMoments):
        inp = GaussianMoments.deterministic(inp)
    layers = params.layers(spec)
    moments = inp
    for index, layer in enumerate(layers):
        moments = adf_linear(moments, layer)
        if index < len(layers) - 1 and spec.activation == Activation.RELU:
            moments = adf_relu(moments)
    return moments
