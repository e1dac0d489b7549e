"""
In-memory datasets and the synthetic generators
"""
import logging
from dataclasses import dataclass

import numpy as np

from errors import PreconditionError
from utils.seeding import child_seed

logger = logging.getLogger(__name__)

TOY_TRAIN_SIZE = 10
TOY_X_RANGE = (-4.0, 4.0)
TOY_NOISE_STD = 3.0
TOY_GRID_RANGE = (-6.0, 6.0)
TOY_GRID_SIZE = 1000
BLOB_CENTER = 1.5


@dataclass(frozen=True)
class Dataset:
    """
    X: (N, n) inputs. Y: (N, m) regression targets, or (N,) integer class
    labels when classification is set.
    """
    X: np.ndarray
    Y: np.ndarray
    name: str = 'dataset'
    classification: bool = False
    n_classes: int = 0

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, np.newaxis]
        if self.classification:
            Y = np.asarray(self.Y).reshape(-1).astype(np.int64)
        else:
            Y = np.asarray(self.Y, dtype=np.float64)
            if Y.ndim == 1:
                Y = Y[:, np.newaxis]
        if X.shape[0] < 1:
            raise PreconditionError(f"dataset '{self.name}' has no rows")
        if Y.shape[0] != X.shape[0]:
            raise PreconditionError(f"dataset '{self.name}': {X.shape[0]} inputs but {Y.shape[0]} targets")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(Y)):
            raise PreconditionError(f"dataset '{self.name}' contains non-finite entries")
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'Y', Y)
        if self.classification and self.n_classes < 1:
            object.__setattr__(self, 'n_classes', int(Y.max()) + 1)

    @property
    def N(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_inputs(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_outputs(self) -> int:
        if self.classification:
            return self.n_classes
        return int(self.Y.shape[1])

    def subset(self, indices) -> 'Dataset':
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[indices], self.Y[indices], self.name, self.classification, self.n_classes)


def toy_cubic(seed: int, n: int = TOY_TRAIN_SIZE) -> Dataset:
    """y = x^3 + eps, x ~ U[-4, 4], eps ~ N(0, 9)"""
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    x = rng.uniform(*TOY_X_RANGE, size=n)
    y = x ** 3 + rng.normal(0.0, TOY_NOISE_STD, size=n)
    return Dataset(x[:, np.newaxis], y[:, np.newaxis], name='toy')


def toy_cubic_testgrid(n: int = TOY_GRID_SIZE) -> Dataset:
    """Equally spaced points on [-6, 6] with noiseless targets x^3"""
    x = np.linspace(*TOY_GRID_RANGE, n)
    return Dataset(x[:, np.newaxis], (x ** 3)[:, np.newaxis], name='toy')


def two_blob_classification(seed: int, N: int = 200) -> Dataset:
    """Two unit-variance 2-D Gaussian blobs centred at (-1.5, 0) and (1.5, 0), N/2 points each"""
    if N < 2 or N % 2:
        raise PreconditionError(f"two_blob needs an even N >= 2, got {N}")
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    half = N // 2
    centers = np.array([[-BLOB_CENTER, 0.0], [BLOB_CENTER, 0.0]])
    labels = np.repeat([0, 1], half)
    X = centers[labels] + rng.standard_normal((N, 2))
    order = rng.permutation(N)
    return Dataset(X[order], labels[order], name='two_blob', classification=True, n_classes=2)


def two_blob_holdout(seed: int, N: int = 1000) -> Dataset:
    """Independent test draw for two_blob_classification(seed)"""
    return two_blob_classification(child_seed(seed, 'two_blob_test'), N)
