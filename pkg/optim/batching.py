"""
Batch planning: which batch index each training step processes
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from errors import PreconditionError

logger = logging.getLogger(__name__)


class BatchMode(str, Enum):
    UNIFORM_IID = 'uniform_iid'
    EPOCH_SHUFFLE = 'epoch_shuffle'


@dataclass(frozen=True)
class BatchPlan:
    """
    Batch i holds the data points data_order[i*b:(i+1)*b]; the last batch
    may be smaller than b. order[s] is the batch processed at step s.
    """
    N: int
    b: int
    n_batches: int
    order: np.ndarray
    mode: BatchMode
    data_order: np.ndarray

    def batch_indices(self, batch: int) -> np.ndarray:
        return self.data_order[batch * self.b:(batch + 1) * self.b]

    @property
    def steps(self) -> int:
        return int(self.order.shape[0])


def n_batches(N: int, b: int) -> int:
    """N_b = ceil(N / b)"""
    return math.ceil(N / b)


def epochs_to_iterations(N: int, b: int, epochs: int) -> int:
    """epochs * N_b"""
    if epochs < 1:
        raise PreconditionError(f"epochs must be >= 1, got {epochs}")
    return epochs * n_batches(N, b)


def make_batch_plan(N: int, b: int, seed: int, mode: BatchMode = BatchMode.EPOCH_SHUFFLE,
                    steps: int = 1) -> BatchPlan:
    """
    uniform_iid draws every step's batch uniformly from [N_b]; epoch_shuffle
    emits a fresh permutation of [N_b] per epoch. Deterministic given seed.
    """
    mode = BatchMode(mode)
    if N < 1:
        raise PreconditionError(f"dataset size must be >= 1, got {N}")
    if not 1 <= b <= N:
        raise PreconditionError(f"batch size must satisfy 1 <= b <= N={N}, got {b}")
    if steps < 1:
        raise PreconditionError(f"steps must be >= 1, got {steps}")

    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    data_order = rng.permutation(N)
    count = n_batches(N, b)
    if mode == BatchMode.UNIFORM_IID:
        order = rng.integers(0, count, size=steps)
    else:
        epochs = math.ceil(steps / count)
        order = np.concatenate([rng.permutation(count) for _ in range(epochs)])[:steps]
    return BatchPlan(N=N, b=b, n_batches=count, order=order.astype(np.int64), mode=mode, data_order=data_order)
