import numpy as np
import pytest

from errors import DivergenceError, InsufficientTraceError, PosteriorFormatError, PreconditionError
from marginals import (
    SwagPosterior,
    ensemble_train,
    load_posterior,
    save_posterior,
    swag_fit,
    swag_sample,
    theta0_seed,
)
from nn_core import init_params, make_spec
from optim import Algorithm, HyperParams, ScheduleSpec, TraceConfig, train


@pytest.fixture
def trace(small_spec, toy_data):
    h = HyperParams(Algorithm.SGD, ScheduleSpec.constant(0.01), batch_size=2, batch_seed=8)
    return train(small_spec, init_params(small_spec, 3), toy_data, h, 60, TraceConfig(cadence=1))


class TestSwagFit:
    def test_matches_two_pass_statistics(self, trace):
        post = swag_fit(trace)
        snapshots = trace.snapshots
        mean = np.mean(snapshots, axis=0)
        var = np.mean((snapshots - mean) ** 2, axis=0)
        assert post.count == snapshots.shape[0] == 31
        np.testing.assert_allclose(post.mean, mean, rtol=0, atol=1e-10)
        np.testing.assert_allclose(post.var, np.maximum(var, 1e-30), rtol=0, atol=1e-10)

    def test_streaming_fit_agrees(self, small_spec, toy_data, trace):
        h = HyperParams(Algorithm.SGD, ScheduleSpec.constant(0.01), batch_size=2, batch_seed=8)
        streamed = train(small_spec, init_params(small_spec, 3), toy_data, h, 60,
                         TraceConfig(cadence=1, mode='streaming'))
        a, b = swag_fit(trace), swag_fit(streamed)
        np.testing.assert_allclose(a.mean, b.mean, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(a.var, b.var, rtol=1e-6, atol=1e-12)

    def test_posterior_is_read_only(self, trace):
        post = swag_fit(trace)
        with pytest.raises(ValueError):
            post.mean[0] = 1.0

    def test_needs_two_iterates(self, small_spec, toy_data):
        h = HyperParams(batch_size=10)
        single = train(small_spec, init_params(small_spec, 0), toy_data, h, 4, TraceConfig(cadence=4))
        assert single.count == 1
        with pytest.raises(InsufficientTraceError):
            swag_fit(single)

    def test_identical_iterates_hit_the_floor(self, trace):
        trace.snapshots = np.repeat(trace.snapshots[:1], 3, axis=0)
        trace.count = 3
        post = swag_fit(trace)
        np.testing.assert_array_equal(post.var, 1e-30)


class TestSwagSample:
    def test_draws_reproduce_moments(self):
        rng = np.random.default_rng(0)
        post = SwagPosterior(mean=rng.uniform(1.0, 5.0, 17), var=rng.uniform(0.01, 1.0, 17), count=10)
        draws = np.stack([swag_sample(post, seed) for seed in range(100_000)])
        np.testing.assert_allclose(draws.mean(axis=0), post.mean, rtol=0.01)
        np.testing.assert_allclose(draws.var(axis=0), post.var, rtol=0.02)

    def test_same_seed_same_draw(self, trace):
        post = swag_fit(trace)
        np.testing.assert_array_equal(swag_sample(post, 42), swag_sample(post, 42))
        assert not np.array_equal(swag_sample(post, 42), swag_sample(post, 43))

    def test_invalid_posterior(self):
        with pytest.raises(PreconditionError):
            SwagPosterior(mean=np.zeros(3), var=np.array([1.0, -1.0, 1.0]), count=2)


class TestEnsembles:
    def test_members_start_from_derived_seeds(self, small_spec, toy_data):
        h = HyperParams(batch_size=5)
        finals = ensemble_train(small_spec, toy_data, h, 10, K0=3, seed=77)
        assert len(finals) == 3
        expected = train(small_spec, init_params(small_spec, theta0_seed(77, 1)), toy_data, h, 10).final
        np.testing.assert_array_equal(finals[1], expected)
        assert not np.array_equal(finals[0], finals[1])

    def test_parallel_matches_serial(self, small_spec, toy_data):
        h = HyperParams(batch_size=5)
        serial = ensemble_train(small_spec, toy_data, h, 10, K0=3, seed=5)
        parallel = ensemble_train(small_spec, toy_data, h, 10, K0=3, seed=5, n_jobs=2)
        for a, b in zip(serial, parallel):
            np.testing.assert_array_equal(a, b)

    def test_returns_traces(self, small_spec, toy_data):
        traces = ensemble_train(small_spec, toy_data, HyperParams(batch_size=5), 10, K0=2, seed=1, return_traces=True)
        assert all(trace.t == 10 for trace in traces)

    def test_divergence_names_member(self, small_spec, toy_data):
        h = HyperParams(lr=ScheduleSpec.constant(1e6), batch_size=10)
        with pytest.raises(DivergenceError) as info:
            ensemble_train(small_spec, toy_data, h, 200, K0=2, seed=0)
        assert info.value.member == 0

    def test_empty_ensemble(self, small_spec, toy_data):
        with pytest.raises(PreconditionError):
            ensemble_train(small_spec, toy_data, HyperParams(batch_size=5), 10, K0=0, seed=0)


class TestPosteriorFiles:
    def test_round_trip(self, tmp_path, trace):
        post = swag_fit(trace)
        path = save_posterior(post, str(tmp_path / 'nested' / 'post.npz'))
        loaded = load_posterior(path, expected_d=post.d)
        np.testing.assert_array_equal(loaded.mean, post.mean)
        np.testing.assert_array_equal(loaded.var, post.var)
        assert loaded.count == post.count

    def test_wrong_dimension(self, tmp_path, trace):
        path = save_posterior(swag_fit(trace), str(tmp_path / 'post.npz'))
        with pytest.raises(PosteriorFormatError):
            load_posterior(path, expected_d=3)

    def test_wrong_version(self, tmp_path):
        path = str(tmp_path / 'old.npz')
        np.savez(path, layout_version=np.int64(0), d=np.int64(2), mean=np.zeros(2), var=np.ones(2), count=np.int64(2))
        with pytest.raises(PosteriorFormatError):
            load_posterior(path)

    def test_missing_fields(self, tmp_path):
        path = str(tmp_path / 'partial.npz')
        np.savez(path, layout_version=np.int64(1), mean=np.zeros(2))
        with pytest.raises(PosteriorFormatError):
            load_posterior(path)

    def test_not_a_record(self, tmp_path):
        path = tmp_path / 'garbage.npz'
        path.write_bytes(b'not a zip file')
        with pytest.raises(PosteriorFormatError):
            load_posterior(str(path))
