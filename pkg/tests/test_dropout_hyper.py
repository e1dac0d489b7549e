import numpy as np
import pytest

from errors import InputShapeError, PreconditionError, PriorMisconfigurationError
from marginals import HyperPrior, PriorKind, apply_mask, sample_hyper, sample_mask
from nn_core import make_spec, maskable_coordinates, param_dim
from optim import Algorithm, HyperParams, ScheduleKind, ScheduleSpec


class TestMasks:
    def test_kept_fraction_close_to_keep_probability(self):
        spec = make_spec((1, 400, 100))
        mask = sample_mask(spec, 0.3, seed=1)
        assert mask.kept_fraction == pytest.approx(0.7, abs=0.01)

    def test_unmaskable_coordinates_always_kept(self):
        spec = make_spec((3, 10, 2))
        mask = sample_mask(spec, 0.5, seed=2)
        np.testing.assert_array_equal(mask.bits[~maskable_coordinates(spec)], 1.0)

    def test_zero_rate_keeps_everything(self):
        spec = make_spec((2, 5, 1))
        mask = sample_mask(spec, 0.0, seed=3)
        np.testing.assert_array_equal(mask.bits, 1.0)
        assert mask.kept_fraction == 1.0

    def test_apply_without_rescaling(self):
        spec = make_spec((1, 4, 1))
        theta = np.arange(1.0, param_dim(spec) + 1.0)
        mask = sample_mask(spec, 0.5, seed=4)
        masked = apply_mask(theta, mask)
        np.testing.assert_array_equal(masked, theta * mask.bits)
        assert set(np.unique(masked / theta)) <= {0.0, 1.0}

    def test_no_mask_returns_theta(self):
        theta = np.ones(5)
        assert apply_mask(theta, None) is theta

    def test_mask_shape_mismatch(self):
        mask = sample_mask(make_spec((1, 4, 1)), 0.5, seed=0)
        with pytest.raises(InputShapeError):
            apply_mask(np.ones(3), mask)

    def test_deterministic(self):
        spec = make_spec((2, 6, 1))
        np.testing.assert_array_equal(sample_mask(spec, 0.4, 9).bits, sample_mask(spec, 0.4, 9).bits)


class TestHyperPriors:
    def test_fixed_returns_template(self):
        template = HyperParams(Algorithm.ADAM, ScheduleSpec.constant(0.02), batch_size=7)
        assert sample_hyper(HyperPrior(PriorKind.FIXED, template), seed=3) == template

    def test_lr_gaussian_moments(self):
        template = HyperParams(lr=ScheduleSpec.constant(0.05), batch_size=4)
        prior = HyperPrior(PriorKind.LR_GAUSSIAN, template, lr_std_ratio=0.01)
        draws = np.array([sample_hyper(prior, seed).lr.alpha for seed in range(5000)])
        assert draws.mean() == pytest.approx(0.05, rel=1e-3)
        assert draws.std() == pytest.approx(0.0005, rel=0.05)
        assert sample_hyper(prior, 0).batch_size == 4

    def test_lr_mean_overrides_template(self):
        prior = HyperPrior(PriorKind.LR_GAUSSIAN, HyperParams(), lr_mean=0.3, lr_std_ratio=0.0)
        assert sample_hyper(prior, 1).lr.alpha == 0.3

    def test_ramp_uniform_bounds(self):
        prior = HyperPrior(PriorKind.LR_RAMP_UNIFORM, HyperParams(), alpha_u_range=(0.04, 0.06),
                           alpha_l_range=(0.008, 0.012), n_e=30)
        for seed in range(200):
            lr = sample_hyper(prior, seed).lr
            assert lr.kind == ScheduleKind.SWA_RAMP
            assert 0.04 <= lr.alpha_u <= 0.06
            assert 0.008 <= lr.alpha_l <= 0.012
            assert lr.n_e == 30

    def test_grid_enumerates_by_index(self):
        prior = HyperPrior(PriorKind.GRID, HyperParams(), grid=((0.04, 1), (0.05, 6)))
        first, second, third = (sample_hyper(prior, 0, index=i) for i in range(3))
        assert (first.lr.alpha, first.batch_size) == (0.04, 1)
        assert (second.lr.alpha, second.batch_size) == (0.05, 6)
        assert third == first

    def test_grid_random_pick_uses_both_points(self):
        prior = HyperPrior(PriorKind.GRID, HyperParams(), grid=((0.04, 1), (0.05, 6)))
        assert {sample_hyper(prior, seed).batch_size for seed in range(50)} == {1, 6}

    def test_impossible_ramp_exhausts_retries(self):
        prior = HyperPrior(PriorKind.LR_RAMP_UNIFORM, HyperParams(), alpha_u_range=(0.001, 0.002),
                           alpha_l_range=(0.01, 0.02), n_e=10)
        with pytest.raises(PriorMisconfigurationError):
            sample_hyper(prior, seed=0)

    def test_centered_on_follows_template(self):
        prior = HyperPrior(PriorKind.LR_GAUSSIAN, HyperParams(lr=ScheduleSpec.constant(0.01)), lr_std_ratio=0.0)
        adam = HyperParams(Algorithm.ADAM, ScheduleSpec.constant(0.2))
        drawn = sample_hyper(prior.centered_on(adam), 0)
        assert drawn.algorithm == Algorithm.ADAM
        assert drawn.lr.alpha == 0.2

    @pytest.mark.parametrize('kwargs', [
        dict(kind=PriorKind.GRID, grid=()),
        dict(kind=PriorKind.GRID, grid=((0.0, 1),)),
        dict(kind=PriorKind.LR_RAMP_UNIFORM, alpha_u_range=(0.04, 0.06)),
        dict(kind=PriorKind.LR_GAUSSIAN, lr_std_ratio=-1.0),
    ])
    def test_invalid_priors(self, kwargs):
        with pytest.raises(PreconditionError):
            HyperPrior(**kwargs)
