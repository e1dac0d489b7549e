"""
Diagonal Gaussian fitted to the optimizer's post-burn-in iterates
"""
import logging
from dataclasses import dataclass

import numpy as np

from errors import InsufficientTraceError, PreconditionError
from optim import TraceMode, TrainTrace

logger = logging.getLogger(__name__)

VAR_FLOOR = 1e-30


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class SwagPosterior:
    mean: np.ndarray
    var: np.ndarray
    count: int

    def __post_init__(self):
        mean = _frozen(self.mean)
        var = _frozen(self.var)
        if mean.ndim != 1 or var.shape != mean.shape:
            raise PreconditionError(f"mean and var must be vectors of equal length, got {mean.shape} and {var.shape}")
        if np.any(var < 0) or not np.all(np.isfinite(var)):
            raise PreconditionError("SWAG variances must be finite and nonnegative")
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'var', var)

    @property
    def d(self) -> int:
        return int(self.mean.shape[0])

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.var)


def swag_fit(trace: TrainTrace, var_floor: float = VAR_FLOOR) -> SwagPosterior:
    """
    Mean and diagonal variance of the collected iterates. Snapshot traces
    use a two-pass computation; streaming traces use the stored raw moments.
    """
    if trace.count < 2:
        raise InsufficientTraceError(
            f"SWAG needs at least 2 post-burn-in iterates, trace holds {trace.count} "
            f"(t={trace.t}, burn-in={trace.burn_in}, cadence={trace.cadence})")
    if trace.mode == TraceMode.STREAMING:
        mean = trace.first_moment
        var = trace.second_moment - mean * mean
    else:
        snapshots = trace.snapshots
        mean = snapshots.mean(axis=0)
        var = np.mean((snapshots - mean) ** 2, axis=0)
    var = np.maximum(var, var_floor)
    logger.debug(f"SWAG fit over {trace.count} iterates, mean variance {float(np.mean(var)):.3g}")
    return SwagPosterior(mean=mean, var=var, count=trace.count)


def swag_sample(post: SwagPosterior, seed: int) -> np.ndarray:
    """theta = mean + sqrt(var) * z with z standard normal"""
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    z = rng.standard_normal(post.d)
    return post.mean + post.std * z
