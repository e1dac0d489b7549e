"""
Bernoulli weight masks. Kept weights are not rescaled: the masked networks
are themselves the model family being averaged.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import InputShapeError
from nn_core import ModelSpec, draw_keep_bits, keep_probabilities


@dataclass(frozen=True)
class DropoutMask:
    bits: np.ndarray
    keep_prob: np.ndarray

    @property
    def kept_fraction(self) -> float:
        maskable = self.keep_prob < 1.0
        if not np.any(maskable):
            return 1.0
        return float(self.bits[maskable].mean())


def sample_mask(spec: ModelSpec, dropout_rate: float, seed: int) -> DropoutMask:
    keep_prob = keep_probabilities(spec, dropout_rate)
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    bits = draw_keep_bits(keep_prob, rng)
    bits.setflags(write=False)
    keep_prob.setflags(write=False)
    return DropoutMask(bits=bits, keep_prob=keep_prob)


def apply_mask(theta: np.ndarray, mask: Optional[DropoutMask]) -> np.ndarray:
    """Hadamard product theta * bits; no mask returns theta itself"""
    if mask is None:
        return theta
    if mask.bits.shape != np.shape(theta):
        raise InputShapeError(f"mask of length {mask.bits.shape[0]} does not fit theta of shape {np.shape(theta)}")
    return theta * mask.bits
