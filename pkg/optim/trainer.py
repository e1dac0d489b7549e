"""
Training loop producing the final iterate and the post-burn-in trace
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np

from errors import DivergenceError, PreconditionError
from nn_core import LossKind, ModelSpec, as_param_vector, draw_keep_bits, keep_probabilities, loss_and_grad
from utils.seeding import rng_for
from .batching import BatchPlan, make_batch_plan
from .hyperparams import HyperParams
from .optimizers import make_optimizer
from .schedules import ScheduleKind, lr_at

logger = logging.getLogger(__name__)


class TraceMode(str, Enum):
    SNAPSHOTS = 'snapshots'
    STREAMING = 'streaming'


@dataclass(frozen=True)
class TraceConfig:
    """
    cadence: 'epoch' (one snapshot at the end of every epoch) or a positive
    step count. burn_in: first iteration collected; None means ceil(t/2).
    """
    cadence: Union[str, int] = 'epoch'
    burn_in: Optional[int] = None
    mode: TraceMode = TraceMode.SNAPSHOTS
    record_full_loss: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'mode', TraceMode(self.mode))
        if self.cadence != 'epoch' and (not isinstance(self.cadence, (int, np.integer)) or self.cadence < 1):
            raise PreconditionError(f"trace cadence must be 'epoch' or a positive integer, got {self.cadence!r}")
        if self.burn_in is not None and self.burn_in < 0:
            raise PreconditionError(f"burn_in must be >= 0, got {self.burn_in}")

    def cadence_steps(self, n_batches: int) -> int:
        return n_batches if self.cadence == 'epoch' else int(self.cadence)

    def burn_in_for(self, t: int) -> int:
        return math.ceil(t / 2) if self.burn_in is None else int(self.burn_in)


@dataclass
class TrainTrace:
    final: np.ndarray
    t: int
    burn_in: int
    cadence: int
    mode: TraceMode
    snapshots: Optional[np.ndarray] = None
    snapshot_steps: Tuple[int, ...] = ()
    first_moment: Optional[np.ndarray] = None
    second_moment: Optional[np.ndarray] = None
    count: int = 0
    losses: np.ndarray = field(default_factory=lambda: np.zeros(0))
    full_losses: Optional[np.ndarray] = None

    def collected_steps(self) -> Tuple[int, ...]:
        """Iterations at which the trace took an iterate"""
        return tuple(s for s in range(1, self.t + 1) if s % self.cadence == 0 and s >= self.burn_in)


def _unpack_data(data) -> Tuple[np.ndarray, np.ndarray]:
    if hasattr(data, 'X') and hasattr(data, 'Y'):
        return np.asarray(data.X), np.asarray(data.Y)
    X, Y = data
    return np.asarray(X), np.asarray(Y)


def _check_schedule_covers(h: HyperParams, plan: BatchPlan, t: int):
    if h.lr.kind != ScheduleKind.SWA_RAMP:
        return
    epochs = math.ceil(t / plan.n_batches)
    if epochs > h.lr.n_e:
        raise PreconditionError(
            f"training runs {epochs} epochs but the swa_ramp schedule only covers n_e={h.lr.n_e}")


def train(spec: ModelSpec, theta0, data, h: HyperParams, t: int,
          trace_cfg: Optional[TraceConfig] = None, loss: Optional[LossKind] = None) -> TrainTrace:
    """
    Run t iterations of the optimizer named by h from theta0.

    The result depends only on (theta0, h, t, data): batch order and the
    training dropout masks come from streams derived from h.batch_seed.
    """
    if t < 1:
        raise PreconditionError(f"train needs t >= 1 iterations, got {t}")
    trace_cfg = trace_cfg or TraceConfig()
    loss = spec.check_loss(loss if loss is not None else spec.default_loss())
    X, Y = _unpack_data(data)
    N = X.shape[0]
    if N == 0:
        raise PreconditionError("train needs a nonempty dataset")

    theta = as_param_vector(spec, theta0).copy()
    plan = make_batch_plan(N, h.batch_size, h.batch_seed, h.batch_mode, t)
    _check_schedule_covers(h, plan, t)
    optimizer = make_optimizer(h, theta.shape[0])

    cadence = trace_cfg.cadence_steps(plan.n_batches)
    burn_in = trace_cfg.burn_in_for(t)
    streaming = trace_cfg.mode == TraceMode.STREAMING
    snapshots, snapshot_steps = [], []
    first_moment = np.zeros_like(theta)
    second_moment = np.zeros_like(theta)
    count = 0
    losses = np.empty(t)
    full_losses = np.empty(t) if trace_cfg.record_full_loss else None

    keep_prob = None
    mask_rng = None
    if spec.dropout_rate > 0:
        keep_prob = keep_probabilities(spec, spec.dropout_rate)
        mask_rng = rng_for(h.batch_seed, 'train_dropout')

    logger.debug(f"Training {h.describe()} for {t} iterations ({plan.n_batches} batches per epoch)")

    for step in range(1, t + 1):
        epoch = (step - 1) // plan.n_batches + 1
        rows = plan.batch_indices(plan.order[step - 1])
        if keep_prob is None:
            value, grad = loss_and_grad(spec, theta, X[rows], Y[rows], loss)
        else:
            bits = draw_keep_bits(keep_prob, mask_rng)
            value, grad = loss_and_grad(spec, theta * bits, X[rows], Y[rows], loss)
            grad = grad * bits

        if not math.isfinite(value):
            logger.error(f"Non-finite loss at iteration {step}")
            raise DivergenceError(step, detail='non-finite loss')
        theta = optimizer.step(theta, grad, lr_at(h.lr, epoch))
        if not np.all(np.isfinite(theta)):
            logger.error(f"Non-finite parameters at iteration {step}")
            raise DivergenceError(step, detail='non-finite parameters')

        losses[step - 1] = value
        if full_losses is not None:
            full_losses[step - 1] = loss_and_grad(spec, theta, X, Y, loss)[0]

        if step % cadence == 0 and step >= burn_in:
            count += 1
            if streaming:
                first_moment += (theta - first_moment) / count
                second_moment += (theta * theta - second_moment) / count
            else:
                snapshots.append(theta.copy())
            snapshot_steps.append(step)

        if step % plan.n_batches == 0:
            logger.debug(f"epoch {epoch}: last minibatch loss {value:.6g}")

    return TrainTrace(
        final=theta,
        t=t,
        burn_in=burn_in,
        cadence=cadence,
        mode=trace_cfg.mode,
        snapshots=None if streaming else (np.vstack(snapshots) if snapshots else np.zeros((0, theta.shape[0]))),
        snapshot_steps=tuple(snapshot_steps),
        first_moment=first_moment if streaming else None,
        second_moment=second_moment if streaming else None,
        count=count,
        losses=losses,
        full_losses=full_losses,
    )
