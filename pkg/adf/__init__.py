"""
One-shot predictive moments by moment matching
"""
from .layers import SIGMA_EPS, GaussianMoments, LayerMoments, adf_linear, adf_relu, relu_moments
from .network import ParamMoments, adf_forward

__all__ = [
    'SIGMA_EPS',
    'GaussianMoments',
    'LayerMoments',
    'adf_linear',
    'adf_relu',
    'relu_moments',
    'ParamMoments',
    'adf_forward',
]
