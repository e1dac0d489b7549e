"""
Training hyperparameter point h
"""
from dataclasses import dataclass, replace
from enum import Enum

from errors import PreconditionError
from .batching import BatchMode
from .schedules import ScheduleSpec


class Algorithm(str, Enum):
    SGD = 'sgd'
    ADAM = 'adam'


@dataclass(frozen=True)
class HyperParams:
    """Optimizer kind, step-size schedule, batch size and batch-order seed"""
    algorithm: Algorithm = Algorithm.SGD
    lr: ScheduleSpec = ScheduleSpec.constant(0.01)
    batch_size: int = 1
    batch_seed: int = 0
    batch_mode: BatchMode = BatchMode.EPOCH_SHUFFLE
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, 'algorithm', Algorithm(self.algorithm))
        object.__setattr__(self, 'batch_mode', BatchMode(self.batch_mode))
        if int(self.batch_size) < 1:
            raise PreconditionError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.algorithm == Algorithm.ADAM:
            if not (0.0 <= self.adam_beta1 < 1.0 and 0.0 <= self.adam_beta2 < 1.0):
                raise PreconditionError("Adam betas must lie in [0, 1)")
            if self.adam_eps < 0:
                raise PreconditionError("Adam eps must be nonnegative")

    def with_lr(self, lr: ScheduleSpec) -> 'HyperParams':
        return replace(self, lr=lr)

    def with_batch(self, batch_size: int) -> 'HyperParams':
        return replace(self, batch_size=int(batch_size))

    def with_seed(self, batch_seed: int) -> 'HyperParams':
        return replace(self, batch_seed=int(batch_seed))

    def describe(self) -> str:
        return (f"{self.algorithm.value}(lr={self.lr.kind.value}:{self.lr.initial_rate:.6g}, "
                f"b={self.batch_size}, mode={self.batch_mode.value})")
