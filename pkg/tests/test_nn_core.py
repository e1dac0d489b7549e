import numpy as np
import pytest

from errors import InputShapeError, PreconditionError
from nn_core import (
    forward,
    forward_cache,
    full_batch_loss,
    init_params,
    keep_probabilities,
    layer_slices,
    loss_and_grad,
    make_spec,
    maskable_coordinates,
    param_dim,
    unpack_params,
)

FD_STEP = 1e-6
KINK_MARGIN = 1e-4


def central_differences(spec, theta, x, y, loss=None):
    grad = np.zeros_like(theta)
    for j in range(theta.shape[0]):
        up, down = theta.copy(), theta.copy()
        up[j] += FD_STEP
        down[j] -= FD_STEP
        grad[j] = (full_batch_loss(spec, up, x, y, loss) - full_batch_loss(spec, down, x, y, loss)) / (2 * FD_STEP)
    return grad


def near_kink(spec, theta, x):
    _, preactivations, _ = forward_cache(spec, theta, x)
    return any(np.any(np.abs(z) < KINK_MARGIN) for z in preactivations[:-1])


class TestLayout:
    def test_param_dim(self):
        assert param_dim(make_spec((1, 50, 1))) == 151
        assert param_dim(make_spec((3, 4, 5, 2))) == 3 * 4 + 4 + 4 * 5 + 5 + 5 * 2 + 2

    def test_slices_are_contiguous_and_layer_major(self):
        spec = make_spec((3, 4, 2))
        slices = layer_slices(spec)
        assert slices[0].weights == slice(0, 12)
        assert slices[0].weight_shape == (4, 3)
        assert slices[0].bias == slice(12, 16)
        assert slices[1].weights == slice(16, 24)
        assert slices[1].bias == slice(24, 26)

    def test_unpack_returns_views(self):
        spec = make_spec((2, 3, 1))
        theta = np.arange(param_dim(spec), dtype=np.float64)
        (w1, b1), (w2, b2) = unpack_params(spec, theta)
        assert w1[1, 0] == 2.0
        np.testing.assert_array_equal(b1, [6.0, 7.0, 8.0])
        assert np.shares_memory(w2, theta)

    def test_invalid_specs(self):
        with pytest.raises(PreconditionError):
            make_spec((3,))
        with pytest.raises(PreconditionError):
            make_spec((2, 0, 1))
        with pytest.raises(PreconditionError):
            make_spec((2, 3, 1), dropout_rate=1.0)


class TestInit:
    def test_glorot_bounds_and_zero_bias(self):
        spec = make_spec((4, 16, 2))
        theta = init_params(spec, seed=9)
        for s in layer_slices(spec):
            fan_out, fan_in = s.weight_shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            assert np.all(np.abs(theta[s.weights]) <= limit)
            assert np.all(theta[s.bias] == 0.0)

    def test_same_seed_same_params(self):
        spec = make_spec((2, 5, 1))
        np.testing.assert_array_equal(init_params(spec, 7), init_params(spec, 7))
        assert not np.array_equal(init_params(spec, 7), init_params(spec, 8))


class TestForward:
    def test_single_input_matches_batch_row(self, small_spec, theta_small):
        x = np.array([[0.3], [-1.2]])
        batch = forward(small_spec, theta_small, x)
        np.testing.assert_array_equal(forward(small_spec, theta_small, x[1]), batch[1])

    def test_hand_computed_network(self):
        spec = make_spec((1, 2, 1))
        # W1 = [[1], [-1]], b1 = [0, 1], W2 = [[2, 3]], b2 = [0.5]
        theta = np.array([1.0, -1.0, 0.0, 1.0, 2.0, 3.0, 0.5])
        # x = 2: hidden = relu([2, -1]) = [2, 0]; out = 4 + 0.5
        np.testing.assert_allclose(forward(spec, theta, [2.0]), [4.5])
        # x = -2: hidden = relu([-2, 3]) = [0, 3]; out = 9 + 0.5
        np.testing.assert_allclose(forward(spec, theta, [-2.0]), [9.5])

    def test_softmax_head_sums_to_one(self, classifier_spec, rng):
        theta = init_params(classifier_spec, 1)
        probs = forward(classifier_spec, theta, rng.normal(size=(5, 2)))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)

    def test_shape_errors(self, small_spec, theta_small):
        with pytest.raises(InputShapeError):
            forward(small_spec, theta_small, np.zeros((3, 2)))
        with pytest.raises(InputShapeError):
            forward(small_spec, theta_small[:-1], [0.0])


class TestGradients:
    @pytest.mark.parametrize('case', range(100))
    def test_backprop_matches_finite_differences(self, case):
        rng = np.random.default_rng(1000 + case)
        depth = int(rng.integers(1, 3))
        sizes = [int(rng.integers(1, 4))] + [int(rng.integers(1, 5)) for _ in range(depth)]
        classifier = case % 3 == 0
        sizes.append(int(rng.integers(2, 4)) if classifier else int(rng.integers(1, 3)))
        activation = 'identity' if case % 7 == 0 else 'relu'
        spec = make_spec(sizes, activation, 'classification_softmax' if classifier else 'regression_identity')
        theta = rng.normal(size=param_dim(spec))
        x = rng.normal(size=(int(rng.integers(1, 5)), sizes[0]))
        if near_kink(spec, theta, x):
            theta = theta + 0.37
            if near_kink(spec, theta, x):
                pytest.skip('input lands on a ReLU kink')
        y = rng.integers(0, sizes[-1], size=x.shape[0]) if classifier else rng.normal(size=(x.shape[0], sizes[-1]))

        _, grad = loss_and_grad(spec, theta, x, y)
        numeric = central_differences(spec, theta, x, y)
        error = np.linalg.norm(grad - numeric) / max(np.linalg.norm(grad) + np.linalg.norm(numeric), 1e-12)
        assert error < 1e-5

    def test_mse_is_mean_over_samples_and_outputs(self):
        spec = make_spec((1, 2), activation='identity')
        theta = np.zeros(param_dim(spec))
        value, _ = loss_and_grad(spec, theta, np.array([[1.0], [2.0]]), np.array([[1.0, 3.0], [0.0, 2.0]]))
        assert value == pytest.approx((1 + 9 + 0 + 4) / 4)

    def test_cross_entropy_of_uniform_logits(self, classifier_spec):
        theta = np.zeros(param_dim(classifier_spec))
        value, _ = loss_and_grad(classifier_spec, theta, np.zeros((3, 2)), [0, 1, 1])
        assert value == pytest.approx(np.log(2.0))

    def test_cross_entropy_needs_softmax_head(self, small_spec, theta_small):
        with pytest.raises(PreconditionError):
            loss_and_grad(small_spec, theta_small, [[0.0]], [0], loss='cross_entropy')

    def test_empty_batch_rejected(self, small_spec, theta_small):
        with pytest.raises(PreconditionError):
            loss_and_grad(small_spec, theta_small, np.zeros((0, 1)), np.zeros((0, 1)))

    def test_label_out_of_range(self, classifier_spec):
        theta = init_params(classifier_spec, 0)
        with pytest.raises(PreconditionError):
            loss_and_grad(classifier_spec, theta, np.zeros((1, 2)), [2])


class TestMaskLayout:
    def test_only_weights_after_hidden_layers_are_maskable(self):
        spec = make_spec((2, 3, 4, 1))
        flags = maskable_coordinates(spec)
        slices = layer_slices(spec)
        assert not flags[slices[0].weights].any()
        assert flags[slices[1].weights].all()
        assert not flags[slices[1].bias].any()
        assert flags[slices[2].weights].all()
        assert flags.sum() == 3 * 4 + 4 * 1

    def test_keep_probabilities(self):
        spec = make_spec((1, 3, 1))
        keep = keep_probabilities(spec, 0.25)
        assert set(np.unique(keep)) == {0.75, 1.0}
        np.testing.assert_array_equal(keep_probabilities(spec, 0.0), 1.0)
