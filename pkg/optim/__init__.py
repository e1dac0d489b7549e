"""
Iterative training: SGD and Adam, learning-rate schedules, batch plans and
the weighted choice between optimizer templates.
"""
from .batching import BatchMode, BatchPlan, epochs_to_iterations, make_batch_plan, n_batches
from .hyperparams import Algorithm, HyperParams
from .optimizers import AdamOptimizer, SGDOptimizer, make_optimizer
from .schedules import ScheduleKind, ScheduleSpec, lr_at
from .selector import AlgorithmSelector, select_algorithm
from .trainer import TraceConfig, TraceMode, TrainTrace, train

__all__ = [
    'BatchMode',
    'BatchPlan',
    'epochs_to_iterations',
    'make_batch_plan',
    'n_batches',
    'Algorithm',
    'HyperParams',
    'AdamOptimizer',
    'SGDOptimizer',
    'make_optimizer',
    'ScheduleKind',
    'ScheduleSpec',
    'lr_at',
    'AlgorithmSelector',
    'select_algorithm',
    'TraceConfig',
    'TraceMode',
    'TrainTrace',
    'train',
]
