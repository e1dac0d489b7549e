"""
Approximate marginalisers for iteration count, initialisation,
hyperparameters, dropout masks and algorithm choice.
"""
from .dropout import DropoutMask, apply_mask, sample_mask
from .ensembles import ensemble_train, theta0_seed, train_member
from .hyperpriors import MAX_DRAWS, HyperPrior, PriorKind, sample_hyper
from .sampler import (
    DEFAULT_COUNTS,
    POINT_LABEL,
    MarginalizationSpec,
    ParamSample,
    TrainedModel,
    Variable,
    draw_param_samples,
    expected_sample_count,
    member_batch_seed,
    models_trained,
    samples_from_models,
    train_models,
)
from .serialization import LAYOUT_VERSION, load_posterior, save_posterior
from .swag import VAR_FLOOR, SwagPosterior, swag_fit, swag_sample

__all__ = [
    'DropoutMask',
    'apply_mask',
    'sample_mask',
    'ensemble_train',
    'theta0_seed',
    'train_member',
    'MAX_DRAWS',
    'HyperPrior',
    'PriorKind',
    'sample_hyper',
    'DEFAULT_COUNTS',
    'POINT_LABEL',
    'MarginalizationSpec',
    'ParamSample',
    'TrainedModel',
    'Variable',
    'draw_param_samples',
    'expected_sample_count',
    'member_batch_seed',
    'models_trained',
    'samples_from_models',
    'train_models',
    'LAYOUT_VERSION',
    'load_posterior',
    'save_posterior',
    'VAR_FLOOR',
    'SwagPosterior',
    'swag_fit',
    'swag_sample',
]
