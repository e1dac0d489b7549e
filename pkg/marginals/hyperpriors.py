"""
Priors over training hyperparameters and seeded draws from them
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from tenacity import retry, retry_if_exception_type, stop_after_attempt

from errors import PreconditionError, PriorMisconfigurationError
from optim import HyperParams, ScheduleKind, ScheduleSpec

logger = logging.getLogger(__name__)

MAX_DRAWS = 100


class PriorKind(str, Enum):
    FIXED = 'fixed'
    LR_GAUSSIAN = 'lr_gaussian'
    LR_RAMP_UNIFORM = 'lr_ramp_uniform'
    GRID = 'grid'


class NonPositiveDraw(Exception):
    """A single draw produced an invalid learning rate"""


@dataclass(frozen=True)
class HyperPrior:
    """
    fixed: the template itself.
    lr_gaussian: constant alpha ~ N(lr_mean, (lr_mean * lr_std_ratio)^2).
    lr_ramp_uniform: swa_ramp with alpha_u ~ U(alpha_u_range), alpha_l ~ U(alpha_l_range).
    grid: one of the (alpha, batch_size) points.
    """
    kind: PriorKind = PriorKind.FIXED
    template: HyperParams = field(default_factory=HyperParams)
    lr_mean: Optional[float] = None
    lr_std_ratio: float = 0.01
    alpha_u_range: Optional[Tuple[float, float]] = None
    alpha_l_range: Optional[Tuple[float, float]] = None
    n_e: Optional[int] = None
    grid: Tuple[Tuple[float, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', PriorKind(self.kind))
        if self.kind == PriorKind.LR_GAUSSIAN:
            if not self.center > 0 or self.lr_std_ratio < 0:
                raise PreconditionError(
                    f"lr_gaussian needs a positive mean and nonnegative std ratio, got {self.center}, {self.lr_std_ratio}")
        elif self.kind == PriorKind.LR_RAMP_UNIFORM:
            for name in ('alpha_u_range', 'alpha_l_range'):
                bounds = getattr(self, name)
                if bounds is None or len(bounds) != 2 or bounds[0] > bounds[1]:
                    raise PreconditionError(f"lr_ramp_uniform needs {name} as (low, high), got {bounds}")
            if self.ramp_epochs is None or self.ramp_epochs < 1:
                raise PreconditionError("lr_ramp_uniform needs the schedule length n_e")
        elif self.kind == PriorKind.GRID:
            object.__setattr__(self, 'grid', tuple((float(a), int(b)) for a, b in self.grid))
            if not self.grid:
                raise PreconditionError("grid prior needs at least one (alpha, batch_size) point")
            for alpha, batch in self.grid:
                if not alpha > 0 or batch < 1:
                    raise PreconditionError(f"grid point ({alpha}, {batch}) needs alpha > 0 and batch_size >= 1")

    @property
    def center(self) -> float:
        """Mean learning rate of lr_gaussian; the template's rate unless lr_mean is set"""
        return self.template.lr.initial_rate if self.lr_mean is None else float(self.lr_mean)

    @property
    def ramp_epochs(self) -> Optional[int]:
        if self.n_e is not None:
            return int(self.n_e)
        if self.template.lr.kind == ScheduleKind.SWA_RAMP:
            return self.template.lr.n_e
        return None

    @property
    def size(self) -> Optional[int]:
        return len(self.grid) if self.kind == PriorKind.GRID else None

    def centered_on(self, template: HyperParams) -> 'HyperPrior':
        return replace(self, template=template)


def _first_valid(draw: Callable[[], HyperParams], prior: HyperPrior) -> HyperParams:
    @retry(
        retry=retry_if_exception_type(NonPositiveDraw),
        stop=stop_after_attempt(MAX_DRAWS),
        reraise=True
    )
    def attempt():
        return draw()

    try:
        return attempt()
    except NonPositiveDraw as e:
        logger.error(f"{MAX_DRAWS} consecutive invalid draws from {prior.kind.value} prior")
        raise PriorMisconfigurationError(
            f"{prior.kind.value} prior produced {MAX_DRAWS} consecutive invalid learning rates") from e


def sample_hyper(prior: HyperPrior, seed: int, index: Optional[int] = None) -> HyperParams:
    """
    One draw of h. Grid priors pick point `index mod len(grid)` when an index
    is given and a uniformly random point otherwise.
    """
    template = prior.template
    if prior.kind == PriorKind.FIXED:
        return template
    if prior.kind == PriorKind.GRID:
        if index is None:
            index = int(np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF).integers(len(prior.grid)))
        alpha, batch = prior.grid[index % len(prior.grid)]
        return template.with_lr(ScheduleSpec.constant(alpha)).with_batch(batch)

    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)

    if prior.kind == PriorKind.LR_GAUSSIAN:
        def draw():
            alpha = float(rng.normal(prior.center, prior.center * prior.lr_std_ratio))
            if not alpha > 0:
                logger.debug(f"rejected nonpositive learning rate draw {alpha}")
                raise NonPositiveDraw(alpha)
            return template.with_lr(ScheduleSpec.constant(alpha))
    else:
        def draw():
            alpha_u = float(rng.uniform(*prior.alpha_u_range))
            alpha_l = float(rng.uniform(*prior.alpha_l_range))
            if not alpha_u > alpha_l > 0:
                logger.debug(f"rejected ramp draw alpha_u={alpha_u}, alpha_l={alpha_l}")
                raise NonPositiveDraw((alpha_u, alpha_l))
            return template.with_lr(ScheduleSpec.swa_ramp(alpha_u, alpha_l, prior.ramp_epochs))

    return _first_valid(draw, prior)
