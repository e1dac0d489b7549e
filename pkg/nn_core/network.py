"""
Deterministic forward pass, Glorot initialisation and exact backpropagation
for the networks described by a ModelSpec.

All parameters travel as one flat float64 vector (a ParamVector); the layout
is fixed by nn_core.model_spec.layer_slices.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import log_softmax, softmax

from errors import InputShapeError, PreconditionError
from .model_spec import Activation, LossKind, ModelSpec, layer_slices, param_dim

logger = logging.getLogger(__name__)

ForwardCache = Tuple[np.ndarray, List[np.ndarray], List[np.ndarray]]


def as_param_vector(spec: ModelSpec, theta) -> np.ndarray:
    """Validate length and finiteness and return theta as a float64 vector"""
    theta = np.asarray(theta, dtype=np.float64)
    d = param_dim(spec)
    if theta.ndim != 1 or theta.shape[0] != d:
        raise InputShapeError(f"ParamVector must have length {d}, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise PreconditionError("ParamVector contains non-finite entries")
    return theta


def unpack_params(spec: ModelSpec, theta: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Return (W, b) views for each layer; W has shape (fan_out, fan_in)"""
    return [(theta[s.weights].reshape(s.weight_shape), theta[s.bias]) for s in layer_slices(spec)]


def init_params(spec: ModelSpec, seed: int) -> np.ndarray:
    """
    Glorot-uniform weights in [-L, L], L = sqrt(6 / (fan_in + fan_out)),
    zero biases. Deterministic given the seed.
    """
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    theta = np.zeros(param_dim(spec), dtype=np.float64)
    for s in layer_slices(spec):
        fan_out, fan_in = s.weight_shape
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        theta[s.weights] = rng.uniform(-limit, limit, size=fan_in * fan_out)
    return theta


def _as_batch(spec: ModelSpec, x) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[np.newaxis, :]
    if x.ndim != 2 or x.shape[1] != spec.n_inputs:
        raise InputShapeError(f"Expected inputs with {spec.n_inputs} features, got shape {np.shape(x)}")
    return x, single


def _activate(spec: ModelSpec, z: np.ndarray) -> np.ndarray:
    if spec.activation == Activation.RELU:
        return np.maximum(z, 0.0)
    return z


def _activation_grad(spec: ModelSpec, z: np.ndarray) -> np.ndarray:
    if spec.activation == Activation.RELU:
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


def forward_cache(spec: ModelSpec, theta, x) -> ForwardCache:
    """
    Forward pass that keeps every pre-activation and activation.

    Returns:
        (logits or outputs before the head, pre-activations per layer,
        activations per layer with the input first)
    """
    theta = as_param_vector(spec, theta)
    a, _ = _as_batch(spec, x)
    activations = [a]
    preactivations = []
    layers = unpack_params(spec, theta)
    for index, (w, b) in enumerate(layers):
        z = a @ w.T + b
        preactivations.append(z)
        if index < len(layers) - 1:
            a = _activate(spec, z)
            activations.append(a)
    return preactivations[-1], preactivations, activations


def forward(spec: ModelSpec, theta, x) -> np.ndarray:
    """f_theta(x); softmax applied for classification heads. Accepts (n,) or (B, n)"""
    _, single = _as_batch(spec, x)
    out, _, _ = forward_cache(spec, theta, x)
    if spec.is_classifier:
        out = softmax(out, axis=-1)
    return out[0] if single else out


def _as_targets(spec: ModelSpec, y, batch_size: int, loss: LossKind) -> np.ndarray:
    if loss == LossKind.CROSS_ENTROPY:
        labels = np.asarray(y).reshape(-1).astype(np.int64)
        if labels.shape[0] != batch_size:
            raise InputShapeError(f"Expected {batch_size} labels, got {labels.shape[0]}")
        if np.any(labels < 0) or np.any(labels >= spec.n_outputs):
            raise PreconditionError(f"Class labels must lie in [0, {spec.n_outputs})")
        return labels
    targets = np.asarray(y, dtype=np.float64)
    if targets.ndim == 1 and spec.n_outputs == 1 and targets.shape[0] == batch_size:
        targets = targets[:, np.newaxis]
    elif targets.ndim == 1 and batch_size == 1:
        targets = targets[np.newaxis, :]
    if targets.shape != (batch_size, spec.n_outputs):
        raise InputShapeError(f"Expected targets of shape {(batch_size, spec.n_outputs)}, got {targets.shape}")
    return targets


def loss_and_grad(spec: ModelSpec, theta, x, y,
                  loss: Optional[LossKind] = None) -> Tuple[float, np.ndarray]:
    """
    Mean loss over the batch and its exact gradient with respect to theta.

    MSE averages the squared error over samples and outputs. Cross-entropy is
    fused with the softmax in log space.
    """
    loss = spec.check_loss(loss if loss is not None else spec.default_loss())
    theta = as_param_vector(spec, theta)
    x_batch, _ = _as_batch(spec, x)
    batch_size = x_batch.shape[0]
    if batch_size == 0:
        raise PreconditionError("loss_and_grad needs a nonempty batch")
    targets = _as_targets(spec, y, batch_size, loss)

    out, preactivations, activations = forward_cache(spec, theta, x_batch)

    if loss == LossKind.MSE:
        residual = out - targets
        value = float(np.mean(residual ** 2))
        delta = 2.0 * residual / residual.size
    else:
        log_probs = log_softmax(out, axis=-1)
        rows = np.arange(batch_size)
        value = float(-np.mean(log_probs[rows, targets]))
        delta = np.exp(log_probs)
        delta[rows, targets] -= 1.0
        delta /= batch_size

    grad = np.zeros_like(theta)
    slices = layer_slices(spec)
    layers = unpack_params(spec, theta)
    for index in range(len(layers) - 1, -1, -1):
        s = slices[index]
        grad[s.weights] = (delta.T @ activations[index]).reshape(-1)
        grad[s.bias] = delta.sum(axis=0)
        if index > 0:
            w, _ = layers[index]
            delta = (delta @ w) * _activation_grad(spec, preactivations[index - 1])
    return value, grad


def full_batch_loss(spec: ModelSpec, theta, x, y, loss: Optional[LossKind] = None) -> float:
    value, _ = loss_and_grad(spec, theta, x, y, loss)
    return value
