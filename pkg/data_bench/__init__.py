"""
Datasets and the evaluation protocol: synthetic generators, delimited file
loading, k-fold splits and standardization.
"""
from .benchmarks import UCI_PRESETS, UCIPreset, get_preset, load_uci
from .datasets import (
    Dataset,
    toy_cubic,
    toy_cubic_testgrid,
    two_blob_classification,
    two_blob_holdout,
)
from .delimited_reader import DelimitedReader, load_delimited
from .folds import STD_FLOOR, FoldSplit, Standardizer, make_folds, standardize

__all__ = [
    'UCI_PRESETS',
    'UCIPreset',
    'get_preset',
    'load_uci',
    'Dataset',
    'toy_cubic',
    'toy_cubic_testgrid',
    'two_blob_classification',
    'two_blob_holdout',
    'DelimitedReader',
    'load_delimited',
    'STD_FLOOR',
    'FoldSplit',
    'Standardizer',
    'make_folds',
    'standardize',
]
