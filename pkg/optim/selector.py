"""
Finite mixture over optimizer templates: one candidate is drawn per model
with probability equal to its weight.
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from errors import PreconditionError
from .hyperparams import HyperParams

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AlgorithmSelector:
    candidates: Tuple[HyperParams, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'candidates', tuple(self.candidates))
        object.__setattr__(self, 'weights', tuple(float(w) for w in self.weights))
        if not self.candidates:
            raise PreconditionError("AlgorithmSelector needs at least one candidate")
        if len(self.weights) != len(self.candidates):
            raise PreconditionError(
                f"{len(self.candidates)} candidates but {len(self.weights)} weights")
        if any(w < 0 or not math.isfinite(w) for w in self.weights):
            raise PreconditionError(f"weights must be finite and nonnegative, got {self.weights}")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise PreconditionError(f"weights must sum to 1, got {total!r}")

    @classmethod
    def uniform(cls, candidates: Sequence[HyperParams]) -> 'AlgorithmSelector':
        candidates = tuple(candidates)
        if not candidates:
            raise PreconditionError("AlgorithmSelector needs at least one candidate")
        return cls(candidates, tuple(1.0 / len(candidates) for _ in candidates))


def select_algorithm(sel: AlgorithmSelector, seed: int) -> HyperParams:
    """One weighted draw from the candidate list"""
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    p = np.asarray(sel.weights, dtype=np.float64)
    index = int(rng.choice(len(sel.candidates), p=p / p.sum()))
    logger.debug(f"selected algorithm candidate {index}: {sel.candidates[index].describe()}")
    return sel.candidates[index]
