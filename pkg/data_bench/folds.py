"""
Train/test folds and z-score standardization fitted on the training fold
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from sklearn.model_selection import KFold
from sklearn.preprocessing import StandardScaler

from errors import PreconditionError
from .datasets import Dataset

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class FoldSplit:
    fold_index: int
    n_folds: int
    train: np.ndarray
    test: np.ndarray
    split_seed: int


def make_folds(N: int, n_folds: int, split_seed: int) -> List[FoldSplit]:
    """Seeded shuffle partitioned into n_folds test blocks whose sizes differ by at most one"""
    if n_folds < 2:
        raise PreconditionError(f"n_folds must be >= 2, got {n_folds}")
    if N < n_folds:
        raise PreconditionError(f"cannot split {N} points into {n_folds} folds")
    splitter = KFold(n_splits=n_folds, shuffle=True, random_state=int(split_seed) % 2 ** 32)
    folds = [
        FoldSplit(index, n_folds, np.sort(train), np.sort(test), split_seed)
        for index, (train, test) in enumerate(splitter.split(np.arange(N)))
    ]
    logger.debug(f"{n_folds} folds over {N} points, test sizes {sorted({len(f.test) for f in folds})}")
    return folds


def _fit_scaler(values: np.ndarray) -> StandardScaler:
    scaler = StandardScaler().fit(values)
    scaler.scale_ = np.maximum(np.sqrt(scaler.var_), STD_FLOOR)
    return scaler


class Standardizer:
    """
    Per-column mean/std of inputs and (for regression) targets, computed on
    the training fold only. Standard deviations are floored at STD_FLOOR.
    """

    def __init__(self, train: Dataset):
        self.classification = train.classification
        self.x_scaler = _fit_scaler(train.X)
        self.y_scaler = None if train.classification else _fit_scaler(train.Y)

    @property
    def x_mean(self) -> np.ndarray:
        return self.x_scaler.mean_

    @property
    def x_std(self) -> np.ndarray:
        return self.x_scaler.scale_

    @property
    def y_mean(self) -> np.ndarray:
        return self.y_scaler.mean_

    @property
    def y_std(self) -> np.ndarray:
        return self.y_scaler.scale_

    def transform_inputs(self, X: np.ndarray) -> np.ndarray:
        return self.x_scaler.transform(X)

    def inverse_inputs(self, X: np.ndarray) -> np.ndarray:
        return self.x_scaler.inverse_transform(X)

    def transform_targets(self, Y: np.ndarray) -> np.ndarray:
        return Y if self.y_scaler is None else self.y_scaler.transform(Y)

    def inverse_targets(self, Y: np.ndarray) -> np.ndarray:
        return Y if self.y_scaler is None else self.y_scaler.inverse_transform(Y)

    def transform(self, dataset: Dataset) -> Dataset:
        return Dataset(self.transform_inputs(dataset.X), self.transform_targets(dataset.Y),
                       dataset.name, dataset.classification, dataset.n_classes)


def standardize(fold: FoldSplit, dataset: Dataset) -> Tuple[Standardizer, Dataset, Dataset]:
    """Fit on the fold's training rows and transform both sides"""
    train = dataset.subset(fold.train)
    test = dataset.subset(fold.test)
    standardizer = Standardizer(train)
    return standardizer, standardizer.transform(train), standardizer.transform(test)
