import math

import numpy as np
import pytest

from data_bench import Dataset, Standardizer
from errors import PreconditionError, UnsupportedHeadError
from marginals import ParamSample, sample_mask
from nn_core import forward, init_params, make_spec
from predictive_metrics import (
    NOISE_FLOOR,
    NoiseModel,
    PredictiveStats,
    accuracy,
    fit_noise,
    interval_coverage,
    mixture_moments,
    moments_over_samples,
    nll_classification,
    nll_gaussian,
    nll_gaussian_pointwise,
    noise_from_mean,
    predictive_mc,
    rmse,
    to_original_units,
)


def samples_of(thetas, masks=None):
    masks = masks or [None] * len(thetas)
    return [ParamSample(theta, mask, 0, i) for i, (theta, mask) in enumerate(zip(thetas, masks))]


class TestPredictiveMC:
    def test_moments_match_numpy(self, small_spec, rng):
        thetas = [init_params(small_spec, s) for s in range(7)]
        x = rng.normal(size=(12, 1))
        stats = predictive_mc(small_spec, samples_of(thetas), x)
        outputs = np.stack([forward(small_spec, t, x) for t in thetas])
        assert stats.K == 7
        np.testing.assert_allclose(stats.mean, outputs.mean(axis=0), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(stats.var, outputs.var(axis=0), rtol=1e-10, atol=1e-14)

    def test_identical_samples_have_zero_variance(self, small_spec, theta_small):
        x = np.linspace(-2, 2, 9)[:, np.newaxis]
        stats = predictive_mc(small_spec, samples_of([theta_small] * 5), x)
        np.testing.assert_array_equal(stats.var, 0.0)
        np.testing.assert_array_equal(stats.mean, forward(small_spec, theta_small, x))

    def test_zero_rate_masks_change_nothing(self, dropout_spec):
        theta = init_params(dropout_spec, 3)
        masks = [sample_mask(dropout_spec, 0.0, seed) for seed in range(4)]
        x = np.linspace(-1, 1, 5)[:, np.newaxis]
        masked = predictive_mc(dropout_spec, samples_of([theta] * 4, masks), x)
        point = predictive_mc(dropout_spec, samples_of([theta]), x)
        np.testing.assert_array_equal(masked.mean, point.mean)
        np.testing.assert_array_equal(masked.var, point.var)

    def test_masked_samples_use_masked_weights(self, dropout_spec):
        theta = init_params(dropout_spec, 3)
        mask = sample_mask(dropout_spec, 0.5, 1)
        x = np.array([[0.7]])
        stats = predictive_mc(dropout_spec, samples_of([theta], [mask]), x)
        np.testing.assert_array_equal(stats.mean, forward(dropout_spec, theta * mask.bits, x))

    def test_classifier_probabilities(self, classifier_spec, rng):
        thetas = [init_params(classifier_spec, s) for s in range(3)]
        stats = predictive_mc(classifier_spec, samples_of(thetas), rng.normal(size=(6, 2)))
        np.testing.assert_allclose(stats.probs.sum(axis=1), 1.0)

    def test_mean_converges_with_more_samples(self, rng):
        spec = make_spec((1, 1), activation='identity')
        centre = np.array([0.8, -0.3])
        spread = 0.5
        x = np.array([[1.0]])
        target = forward(spec, centre, x)[0, 0]
        for K in (10, 100, 1000, 10000):
            thetas = centre + spread * rng.standard_normal((K, 2))
            stats = predictive_mc(spec, samples_of(list(thetas)), x)
            # output sd is spread * sqrt(x^2 + 1)
            assert abs(stats.mean[0, 0] - target) < 4.0 * spread * math.sqrt(2.0) / math.sqrt(K)

    def test_no_samples(self, small_spec):
        with pytest.raises(PreconditionError):
            predictive_mc(small_spec, [], np.zeros((1, 1)))

    def test_shifted_moments_resist_offsets(self):
        outputs = 1e8 + np.array([[1.0], [2.0], [3.0]])
        mean, var = moments_over_samples(outputs)
        assert mean[0] == 1e8 + 2.0
        assert var[0] == pytest.approx(2.0 / 3.0, rel=1e-12)


class TestNoise:
    def test_floor_on_perfect_fit(self):
        noise = noise_from_mean(np.ones((4, 1)), np.ones((4, 1)))
        assert noise.sigma2_noise == NOISE_FLOOR

    def test_mean_squared_residual(self):
        noise = noise_from_mean(np.array([[1.0], [3.0]]), np.array([[0.0], [0.0]]))
        assert noise.sigma2_noise == pytest.approx(5.0)

    def test_fit_noise_uses_training_predictions(self, small_spec, theta_small, toy_data):
        noise = fit_noise(small_spec, samples_of([theta_small]), toy_data)
        residual = toy_data.Y - forward(small_spec, theta_small, toy_data.X)
        assert noise.sigma2_noise == pytest.approx(max(float(np.mean(residual ** 2)), NOISE_FLOOR))

    def test_fit_noise_rejects_classifiers(self, classifier_spec, blob_data):
        with pytest.raises(UnsupportedHeadError):
            fit_noise(classifier_spec, samples_of([init_params(classifier_spec, 0)]), blob_data)

    def test_negative_noise(self):
        with pytest.raises(PreconditionError):
            NoiseModel(-1.0)


class TestScoring:
    def test_standard_normal_nll(self):
        stats = PredictiveStats(np.zeros((1, 1)), np.ones((1, 1)), K=1)
        assert nll_gaussian(np.zeros((1, 1)), stats) == pytest.approx(0.5 * math.log(2 * math.pi))

    def test_noise_adds_to_variance(self):
        stats = PredictiveStats(np.zeros((2, 1)), np.full((2, 1), 0.5), K=3)
        y = np.array([[1.0], [-1.0]])
        expected = 0.5 * math.log(2 * math.pi * 2.0) + 1.0 / 4.0
        assert nll_gaussian(y, stats, NoiseModel(1.5)) == pytest.approx(expected)

    def test_pointwise_sums_outputs(self):
        stats = PredictiveStats(np.zeros((1, 2)), np.ones((1, 2)), K=1)
        assert nll_gaussian_pointwise(np.zeros((1, 2)), stats)[0] == pytest.approx(math.log(2 * math.pi))

    def test_zero_variance_without_noise_rejected(self):
        stats = PredictiveStats(np.zeros((1, 1)), np.zeros((1, 1)), K=1)
        with pytest.raises(PreconditionError):
            nll_gaussian(np.zeros((1, 1)), stats)

    def test_nll_is_smallest_when_variance_matches_squared_error(self):
        y, mean = np.array([[1.7]]), np.array([[0.2]])
        variances = np.linspace(0.05, 6.0, 2000)
        nll = [nll_gaussian(y, PredictiveStats(mean, np.array([[v]]), K=1)) for v in variances]
        assert variances[int(np.argmin(nll))] == pytest.approx((1.7 - 0.2) ** 2, abs=3e-3)

    def test_metrics_ignore_point_order(self, rng):
        y = rng.normal(size=(30, 1))
        stats = PredictiveStats(rng.normal(size=(30, 1)), rng.uniform(0.1, 2.0, size=(30, 1)), K=4)
        probs = rng.dirichlet(np.ones(3), size=30)
        labels = rng.integers(0, 3, size=30)
        order = rng.permutation(30)
        shuffled = PredictiveStats(stats.mean[order], stats.var[order], K=4)
        noise = NoiseModel(0.3)
        assert nll_gaussian(y[order], shuffled, noise) == nll_gaussian(y, stats, noise)
        assert rmse(stats.mean[order], y[order]) == rmse(stats.mean, y)
        assert accuracy(probs[order], labels[order]) == accuracy(probs, labels)
        assert nll_classification(probs[order], labels[order]) == nll_classification(probs, labels)
        assert interval_coverage(y[order], stats.mean[order], stats.var[order]) == \
            interval_coverage(y, stats.mean, stats.var)

    def test_rmse(self):
        assert rmse(np.array([[1.0], [2.0]]), np.array([[1.0], [4.0]])) == pytest.approx(math.sqrt(2.0))
        with pytest.raises(PreconditionError):
            rmse(np.zeros((2, 1)), np.zeros((3, 1)))

    def test_classification_metrics(self):
        probs = np.array([[0.9, 0.1], [0.2, 0.8], [1.0, 0.0]])
        labels = np.array([0, 0, 1])
        assert accuracy(probs, labels) == pytest.approx(1.0 / 3.0)
        expected = (-math.log(0.9) - math.log(0.2) - math.log(1e-12)) / 3.0
        assert nll_classification(probs, labels) == pytest.approx(expected)

    def test_interval_coverage(self):
        mean = np.zeros((4, 1))
        y = np.array([[0.5], [2.9], [3.1], [-4.0]])
        assert interval_coverage(y, mean, np.ones((4, 1))) == 0.5

    def test_negative_variance_rejected(self):
        with pytest.raises(PreconditionError):
            PredictiveStats(np.zeros(2), np.array([0.1, -0.1]), K=2)


class TestUnitsAndMixtures:
    def test_to_original_units(self):
        raw = Dataset(np.arange(6.0)[:, np.newaxis], np.array([1.0, 3.0, 5.0, 7.0, 9.0, 11.0]), 'lin')
        standardizer = Standardizer(raw)
        scale = float(standardizer.y_std[0])
        shift = float(standardizer.y_mean[0])
        stats = PredictiveStats(np.array([[0.5]]), np.array([[0.25]]), K=2)
        converted, noise = to_original_units(stats, NoiseModel(0.1), standardizer)
        assert converted.mean[0, 0] == pytest.approx(0.5 * scale + shift)
        assert converted.var[0, 0] == pytest.approx(0.25 * scale ** 2)
        assert noise.sigma2_noise == pytest.approx(0.1 * scale ** 2)

    def test_mixture_moments(self):
        stats = mixture_moments([np.array([0.0]), np.array([2.0])], [np.array([1.0]), np.array([3.0])])
        assert stats.mean[0] == pytest.approx(1.0)
        assert stats.var[0] == pytest.approx(2.0 + 1.0)
        assert stats.K == 2

    def test_mixture_needs_components(self):
        with pytest.raises(PreconditionError):
            mixture_moments([], [])
