"""
Deep ensembles: independent initialisations, identical training
"""
import logging
from typing import List, Optional, Union

import numpy as np
from joblib import Parallel, delayed

from errors import DivergenceError, PreconditionError
from nn_core import LossKind, ModelSpec, init_params
from optim import HyperParams, TraceConfig, TrainTrace, train
from utils.seeding import child_seed

logger = logging.getLogger(__name__)


def theta0_seed(seed: int, member: int) -> int:
    """Initialisation seed of ensemble member k"""
    return child_seed(seed, 'theta0', member)


def train_member(spec: ModelSpec, data, h: HyperParams, t: int, init_seed: int, member: int,
                 trace_cfg: Optional[TraceConfig] = None, loss: Optional[LossKind] = None) -> TrainTrace:
    """Train one model from init_params(spec, init_seed); divergence names the member"""
    theta0 = init_params(spec, init_seed)
    try:
        return train(spec, theta0, data, h, t, trace_cfg, loss)
    except DivergenceError as e:
        logger.error(f"Ensemble member {member} diverged at iteration {e.iteration}")
        raise e.for_member(member) from e


def ensemble_train(spec: ModelSpec, data, h: HyperParams, t: int, K0: int, seed: int,
                   trace_cfg: Optional[TraceConfig] = None, loss: Optional[LossKind] = None,
                   return_traces: bool = False, n_jobs: int = 1) -> List[Union[np.ndarray, TrainTrace]]:
    """
    K0 members with theta0 from init_params(spec, child_seed(seed, 'theta0', k)),
    each trained with the same h. Returns final iterates, or the full traces
    when return_traces is set (SWAG per member).
    """
    if K0 < 1:
        raise PreconditionError(f"ensemble size must be >= 1, got {K0}")
    logger.info(f"Training {K0}-member ensemble with {h.describe()} for {t} iterations")
    traces = Parallel(n_jobs=n_jobs)(
        delayed(train_member)(spec, data, h, t, theta0_seed(seed, k), k, trace_cfg, loss)
        for k in range(K0)
    )
    if return_traces:
        return list(traces)
    return [trace.final for trace in traces]
