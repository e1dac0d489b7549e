"""
Declarative experiment runner: config parsing, the fold x label sweep and
the result files.
"""
from .experiment_config import ExperimentConfig, load_config, parse_config
from .results import summarize, trend_table, write_results
from .runner import (
    CellResult,
    ExperimentRunner,
    FailureRow,
    FoldData,
    PredictionRow,
    ResultRow,
    prepare_folds,
    run_cell,
    run_experiment,
)

__all__ = [
    'ExperimentConfig',
    'load_config',
    'parse_config',
    'summarize',
    'trend_table',
    'write_results',
    'CellResult',
    'ExperimentRunner',
    'FailureRow',
    'FoldData',
    'PredictionRow',
    'ResultRow',
    'prepare_folds',
    'run_cell',
    'run_experiment',
]
