"""
Bernoulli weight masks aligned with the ParamVector layout.

Only weights that consume a hidden layer's output are maskable (the dropout
layer sits after each hidden layer); biases and first-layer weights always
have keep probability 1.
"""
import numpy as np

from errors import PreconditionError
from .model_spec import ModelSpec, layer_slices, param_dim


def maskable_coordinates(spec: ModelSpec) -> np.ndarray:
    """Boolean vector of length d marking the coordinates dropout may remove"""
    flags = np.zeros(param_dim(spec), dtype=bool)
    for s in layer_slices(spec)[1:]:
        flags[s.weights] = True
    return flags


def keep_probabilities(spec: ModelSpec, dropout_rate: float) -> np.ndarray:
    if not 0.0 <= dropout_rate < 1.0:
        raise PreconditionError(f"dropout_rate must lie in [0, 1), got {dropout_rate}")
    keep = np.ones(param_dim(spec), dtype=np.float64)
    keep[maskable_coordinates(spec)] = 1.0 - dropout_rate
    return keep


def draw_keep_bits(keep_prob: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One independent Bernoulli(keep_prob[j]) draw per coordinate, as float 0/1"""
    bits = (rng.random(keep_prob.shape[0]) < keep_prob).astype(np.float64)
    bits[keep_prob >= 1.0] = 1.0
    return bits
