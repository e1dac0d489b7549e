"""
Combined marginalisation: draws parameter samples for any subset of
{t, theta0, h, m_theta, alg}.

Sample sets follow Cartesian product semantics. For each theta0 member (or
the single base model), for each algorithm draw, for each hyperparameter
draw, one model is trained; SWAG supplies K_t samples per model when t is
selected, and each sample carries K_m masks when m_theta is selected.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from errors import PreconditionError
from nn_core import LossKind, ModelSpec
from optim import (
    AlgorithmSelector,
    HyperParams,
    TraceConfig,
    TrainTrace,
    epochs_to_iterations,
    select_algorithm,
)
from utils.seeding import child_seed
from .dropout import DropoutMask, sample_mask
from .ensembles import theta0_seed, train_member
from .hyperpriors import HyperPrior, PriorKind, sample_hyper
from .swag import SwagPosterior, swag_fit, swag_sample

logger = logging.getLogger(__name__)

POINT_LABEL = 'point'


class Variable(str, Enum):
    T = 't'
    THETA0 = 'theta0'
    H = 'h'
    M_THETA = 'm_theta'
    ALG = 'alg'


DEFAULT_COUNTS: Dict[Variable, int] = {
    Variable.T: 10,
    Variable.THETA0: 5,
    Variable.H: 5,
    Variable.M_THETA: 10,
    Variable.ALG: 2,
}


@dataclass(frozen=True)
class MarginalizationSpec:
    """
    Selected variables with their sample counts: K_t SWAG draws, K_0 ensemble
    members, K_h hyperparameter draws, K_m masks, K_alg algorithm draws.
    An empty selection is the classical point estimate.

    cross_product shares one set of hyperparameter and algorithm draws
    across all ensemble members; otherwise every member gets its own.
    """
    variables: FrozenSet[Variable] = frozenset()
    counts: Mapping[Variable, int] = field(default_factory=lambda: dict(DEFAULT_COUNTS))
    master_seed: int = 0
    cross_product: bool = False

    def __post_init__(self):
        variables = frozenset(Variable(v) for v in self.variables)
        counts = dict(DEFAULT_COUNTS)
        counts.update({Variable(k): int(v) for k, v in dict(self.counts).items()})
        for variable in variables:
            if counts[variable] < 1:
                raise PreconditionError(f"sample count for {variable.value} must be >= 1, got {counts[variable]}")
        object.__setattr__(self, 'variables', variables)
        object.__setattr__(self, 'counts', counts)

    @classmethod
    def from_label(cls, label: str, counts: Optional[Mapping] = None, master_seed: int = 0,
                   cross_product: bool = False) -> 'MarginalizationSpec':
        """Parse '+'-joined tokens; '' and 'point' select nothing"""
        label = (label or '').strip()
        tokens = [] if label in ('', POINT_LABEL) else [token.strip() for token in label.split('+')]
        variables = set()
        for token in tokens:
            try:
                variable = Variable(token)
            except ValueError:
                valid = ', '.join(v.value for v in Variable)
                raise PreconditionError(f"unknown marginalisation '{token}' in label '{label}' (valid: {valid})")
            if variable in variables:
                raise PreconditionError(f"marginalisation '{token}' repeated in label '{label}'")
            variables.add(variable)
        return cls(frozenset(variables), counts or {}, master_seed, cross_product)

    @property
    def label(self) -> str:
        return '+'.join(v.value for v in Variable if v in self.variables)

    @property
    def display_label(self) -> str:
        return self.label or POINT_LABEL

    def selects(self, variable: Variable) -> bool:
        return variable in self.variables

    def count(self, variable: Variable) -> int:
        """Sample count of a selected variable; 1 for unselected ones"""
        return self.counts[variable] if variable in self.variables else 1

    def with_seed(self, master_seed: int) -> 'MarginalizationSpec':
        return replace(self, master_seed=int(master_seed))


class ParamSample(NamedTuple):
    theta: np.ndarray
    mask: Optional[DropoutMask]
    member: int
    model: int


@dataclass
class TrainedModel:
    member: int
    alg_draw: int
    hyper_draw: int
    h: HyperParams
    trace: TrainTrace
    posterior: Optional[SwagPosterior] = None


def models_trained(mspec: MarginalizationSpec) -> int:
    """K0 * K_alg * K_h; SWAG and mask draws reuse trained models"""
    return mspec.count(Variable.THETA0) * mspec.count(Variable.ALG) * mspec.count(Variable.H)


def expected_sample_count(mspec: MarginalizationSpec) -> int:
    return int(np.prod([mspec.count(v) for v in Variable]))


def member_batch_seed(master_seed: int, member: int) -> int:
    """Batch-order seed of ensemble member k; member 0 is also the point estimate"""
    return child_seed(master_seed, 'batch', member)


def _data_size(data) -> int:
    X = data.X if hasattr(data, 'X') else data[0]
    return int(np.shape(X)[0])


def _hyper_plan(mspec: MarginalizationSpec, base_h: HyperParams, data, t: int, epochs: Optional[int],
                prior: Optional[HyperPrior], selector: Optional[AlgorithmSelector]) -> List[Tuple]:
    master = mspec.master_seed
    N = _data_size(data)
    plan = []
    for member in range(mspec.count(Variable.THETA0)):
        owner = 0 if mspec.cross_product else member
        batch_seed = member_batch_seed(master, member)
        for j in range(mspec.count(Variable.ALG)):
            h = base_h
            if mspec.selects(Variable.ALG):
                h = select_algorithm(selector, child_seed(master, 'alg', owner, j))
            for i in range(mspec.count(Variable.H)):
                h_i = h
                if mspec.selects(Variable.H):
                    index = i if prior.kind == PriorKind.GRID else None
                    h_i = sample_hyper(prior.centered_on(h), child_seed(master, 'hyper', owner, j, i), index=index)
                h_i = h_i.with_seed(batch_seed)
                steps = t if epochs is None else epochs_to_iterations(N, h_i.batch_size, epochs)
                plan.append((member, j, i, h_i, steps))
    return plan


def train_models(mspec: MarginalizationSpec, spec: ModelSpec, data, base_h: HyperParams, t: int,
                 epochs: Optional[int] = None, prior: Optional[HyperPrior] = None,
                 selector: Optional[AlgorithmSelector] = None, trace_cfg: Optional[TraceConfig] = None,
                 loss: Optional[LossKind] = None, n_jobs: int = 1) -> List[TrainedModel]:
    """
    Train every model the selection needs. When epochs is given, each model
    runs epochs * ceil(N / b) iterations for its own batch size b.
    """
    if mspec.selects(Variable.H) and prior is None:
        raise PreconditionError("marginalising h needs a hyperparameter prior")
    if mspec.selects(Variable.ALG) and selector is None:
        raise PreconditionError("marginalising alg needs an algorithm selector")

    plan = _hyper_plan(mspec, base_h, data, t, epochs, prior, selector)
    logger.info(f"[{mspec.display_label}] training {len(plan)} model(s)")
    traces = Parallel(n_jobs=n_jobs)(
        delayed(train_member)(spec, data, h, steps, theta0_seed(mspec.master_seed, member), member, trace_cfg, loss)
        for member, _, _, h, steps in plan
    )

    models = []
    for (member, j, i, h, _), trace in zip(plan, traces):
        posterior = swag_fit(trace) if mspec.selects(Variable.T) else None
        models.append(TrainedModel(member=member, alg_draw=j, hyper_draw=i, h=h, trace=trace, posterior=posterior))
    return models


def samples_from_models(mspec: MarginalizationSpec, spec: ModelSpec, models: List[TrainedModel],
                        dropout_rate: Optional[float] = None) -> List[ParamSample]:
    master = mspec.master_seed
    rate = spec.dropout_rate if dropout_rate is None else dropout_rate
    samples = []
    for index, model in enumerate(models):
        key = (model.member, model.alg_draw, model.hyper_draw)
        if mspec.selects(Variable.T):
            thetas = [swag_sample(model.posterior, child_seed(master, 'swag', *key, s))
                      for s in range(mspec.count(Variable.T))]
        else:
            thetas = [model.trace.final]
        for s, theta in enumerate(thetas):
            if mspec.selects(Variable.M_THETA):
                for r in range(mspec.count(Variable.M_THETA)):
                    mask = sample_mask(spec, rate, child_seed(master, 'mask', *key, s, r))
                    samples.append(ParamSample(theta, mask, model.member, index))
            else:
                samples.append(ParamSample(theta, None, model.member, index))
    return samples


def draw_param_samples(mspec: MarginalizationSpec, spec: ModelSpec, data, base_h: HyperParams, t: int,
                       **kwargs) -> List[ParamSample]:
    """
    Parameter samples for the selected marginalisations; exactly the product
    of the selected counts. Keyword arguments go to train_models, except
    dropout_rate which overrides spec.dropout_rate for test-time masks.
    """
    dropout_rate = kwargs.pop('dropout_rate', None)
    models = train_models(mspec, spec, data, base_h, t, **kwargs)
    samples = samples_from_models(mspec, spec, models, dropout_rate)
    logger.debug(f"[{mspec.display_label}] drew {len(samples)} parameter samples")
    return samples
