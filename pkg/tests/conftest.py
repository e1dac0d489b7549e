import logging

import numpy as np
import pytest

from data_bench import Dataset, Standardizer, toy_cubic, two_blob_classification
from nn_core import init_params, make_spec

logging.getLogger('joblib').setLevel(logging.WARNING)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_spec():
    return make_spec((1, 8, 1))


@pytest.fixture
def dropout_spec():
    return make_spec((1, 8, 1), dropout_rate=0.2)


@pytest.fixture
def classifier_spec():
    return make_spec((2, 6, 2), output_head='classification_softmax')


@pytest.fixture
def toy_data():
    """Ten cubic toy points, z-scored"""
    raw = toy_cubic(seed=3, n=10)
    return Standardizer(raw).transform(raw)


@pytest.fixture
def blob_data():
    return two_blob_classification(seed=4, N=40)


@pytest.fixture
def linear_data():
    """y = 2x - 1 on 32 points, noiseless"""
    x = np.linspace(-1.0, 1.0, 32)[:, np.newaxis]
    return Dataset(x, 2.0 * x - 1.0, 'linear')


@pytest.fixture
def theta_small(small_spec):
    return init_params(small_spec, seed=0)


def write_config(tmp_path, text, name='experiment.ini'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)
