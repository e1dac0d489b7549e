"""
Learning-rate schedules along training epochs
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from errors import PreconditionError

logger = logging.getLogger(__name__)


class ScheduleKind(str, Enum):
    CONSTANT = 'constant'
    SWA_RAMP = 'swa_ramp'


@dataclass(frozen=True)
class ScheduleSpec:
    """
    constant: alpha every epoch.
    swa_ramp: alpha_u for the first half of n_e epochs, a linear decrease to
    alpha_l between 0.5*n_e and 0.9*n_e, alpha_l afterwards.
    """
    kind: ScheduleKind = ScheduleKind.CONSTANT
    alpha: Optional[float] = None
    alpha_u: Optional[float] = None
    alpha_l: Optional[float] = None
    n_e: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', ScheduleKind(self.kind))
        if self.kind == ScheduleKind.CONSTANT:
            if self.alpha is None or not self.alpha > 0:
                raise PreconditionError(f"constant schedule needs alpha > 0, got {self.alpha}")
        else:
            if self.alpha_u is None or self.alpha_l is None or self.n_e is None:
                raise PreconditionError("swa_ramp schedule needs alpha_u, alpha_l and n_e")
            if not self.alpha_u > self.alpha_l > 0:
                raise PreconditionError(
                    f"swa_ramp needs alpha_u > alpha_l > 0, got alpha_u={self.alpha_u}, alpha_l={self.alpha_l}")
            if int(self.n_e) < 1:
                raise PreconditionError(f"swa_ramp needs n_e >= 1, got {self.n_e}")

    @classmethod
    def constant(cls, alpha: float) -> 'ScheduleSpec':
        return cls(ScheduleKind.CONSTANT, alpha=float(alpha))

    @classmethod
    def swa_ramp(cls, alpha_u: float, alpha_l: float, n_e: int) -> 'ScheduleSpec':
        return cls(ScheduleKind.SWA_RAMP, alpha_u=float(alpha_u), alpha_l=float(alpha_l), n_e=int(n_e))

    @property
    def initial_rate(self) -> float:
        return self.alpha if self.kind == ScheduleKind.CONSTANT else self.alpha_u


def lr_at(sched: ScheduleSpec, e: int) -> float:
    """Learning rate for epoch e (1-based)"""
    if sched.kind == ScheduleKind.CONSTANT:
        return float(sched.alpha)
    n_e = sched.n_e
    if not 1 <= e <= n_e:
        raise PreconditionError(f"epoch {e} outside [1, {n_e}] for swa_ramp schedule")
    if e < 0.5 * n_e:
        return float(sched.alpha_u)
    if e > 0.9 * n_e:
        return float(sched.alpha_l)
    return float(sched.alpha_u - (sched.alpha_u - sched.alpha_l) * (e - 0.5 * n_e) / (0.4 * n_e))
