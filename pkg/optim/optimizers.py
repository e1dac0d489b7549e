"""
Parameter update rules
"""
import numpy as np

from .hyperparams import Algorithm, HyperParams


class SGDOptimizer:
    """theta <- theta - lr * g"""

    def step(self, theta: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        return theta - lr * grad


class AdamOptimizer:
    """Adam with bias-corrected first and second moment estimates"""

    def __init__(self, dim: int, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return theta - lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(h: HyperParams, dim: int):
    """Fresh optimizer state for h.algorithm over a dim-length parameter vector"""
    if h.algorithm == Algorithm.ADAM:
        return AdamOptimizer(dim, h.adam_beta1, h.adam_beta2, h.adam_eps)
    return SGDOptimizer()
