"""
Experiment execution: every (fold, method) cell trains the models its
marginalisation label needs, scores them on the test split and reports one
final row plus ensemble-size prefix rows.

Cells seed themselves from (master seed, fold) only, so every method in a
fold sees the same data order, initialisations and draws where they overlap.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from adf import ParamMoments, adf_forward
from data_bench import (
    UCI_PRESETS,
    Dataset,
    Standardizer,
    load_delimited,
    load_uci,
    make_folds,
    toy_cubic,
    toy_cubic_testgrid,
    two_blob_classification,
    two_blob_holdout,
)
from errors import CellFailure, HypermarginalError
from marginals import (
    MarginalizationSpec,
    SwagPosterior,
    TrainedModel,
    Variable,
    models_trained,
    samples_from_models,
    train_models,
)
from nn_core import ModelSpec
from optim import epochs_to_iterations
from predictive_metrics import (
    NoiseModel,
    PredictiveStats,
    accuracy,
    mixture_moments,
    nll_classification,
    nll_gaussian,
    noise_from_mean,
    rmse,
    sample_outputs,
    stats_from_outputs,
    to_original_units,
)
from utils.seeding import child_seed
from .experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)

FINAL = 'final'
TREND = 'trend'
ADF_SUFFIX = ' (adf)'
DEFAULT_FOLDS = 20
DEFAULT_HIDDEN = 50
DEFAULT_SIZES = {'toy': (10, 1000), 'two_blob': (200, 1000)}


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    method: str
    fold: int
    seed: int
    nll: float
    metric: float
    ensemble_size: int
    models_trained: int
    wall_time_s: float
    kind: str = FINAL


@dataclass(frozen=True)
class PredictionRow:
    dataset: str
    method: str
    fold: int
    index: int
    x0: float
    y: float
    mean: float
    std: float


@dataclass(frozen=True)
class FailureRow:
    dataset: str
    method: str
    fold: int
    error: str


@dataclass(frozen=True)
class FoldData:
    """Training and test splits in model units plus the raw test values for scoring"""
    fold: int
    train: Dataset
    test: Dataset
    test_x_raw: np.ndarray
    test_y_raw: np.ndarray
    standardizer: Optional[Standardizer] = None


@dataclass
class CellResult:
    rows: List[ResultRow] = field(default_factory=list)
    predictions: List[PredictionRow] = field(default_factory=list)
    failures: List[FailureRow] = field(default_factory=list)
    posteriors: List[Tuple[str, SwagPosterior]] = field(default_factory=list)


def data_seed(cfg: ExperimentConfig) -> int:
    """Synthetic data seed, derived from the master seed unless set"""
    return cfg.data_seed if cfg.data_seed is not None else child_seed(cfg.seed, 'data')


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    """The training pool (holdout) or the full table to be split (folds)"""
    kind = cfg.dataset_kind
    if kind in DEFAULT_SIZES:
        size = cfg.train_size or DEFAULT_SIZES[kind][0]
        if kind == 'toy':
            return toy_cubic(data_seed(cfg), size)
        return two_blob_classification(data_seed(cfg), size)
    if kind == 'uci':
        return load_uci(cfg.dataset_name, cfg.data_dir, cfg.delimiter)
    return load_delimited(cfg.dataset_path, cfg.target_cols, cfg.delimiter, cfg.target_select)


def load_holdout_test(cfg: ExperimentConfig) -> Dataset:
    size = cfg.test_size or DEFAULT_SIZES[cfg.dataset_kind][1]
    if cfg.dataset_kind == 'toy':
        return toy_cubic_testgrid(size)
    return two_blob_holdout(data_seed(cfg), size)


def resolved_folds(cfg: ExperimentConfig) -> int:
    """Fold count: config, then UCI preset, then 20"""
    if cfg.n_folds is not None:
        return cfg.n_folds
    if cfg.dataset_kind == 'uci':
        return UCI_PRESETS[cfg.dataset_name].n_folds
    return DEFAULT_FOLDS


def resolved_hidden(cfg: ExperimentConfig) -> Tuple[int, ...]:
    if cfg.hidden:
        return cfg.hidden
    if cfg.dataset_kind == 'uci':
        return (UCI_PRESETS[cfg.dataset_name].hidden,)
    return (DEFAULT_HIDDEN,)


def _fold_data(cfg: ExperimentConfig, fold: int, train: Dataset, test: Dataset) -> FoldData:
    if not cfg.standardize:
        return FoldData(fold, train, test, test.X, test.Y)
    standardizer = Standardizer(train)
    return FoldData(fold, standardizer.transform(train), standardizer.transform(test), test.X, test.Y, standardizer)


def prepare_folds(cfg: ExperimentConfig) -> Tuple[str, List[FoldData]]:
    """Dataset name and the standardized train/test pairs to score"""
    dataset = load_dataset(cfg)
    if cfg.protocol_mode == 'holdout':
        logger.info(f"Holdout evaluation on {dataset.name}: {dataset.N} training points")
        return dataset.name, [_fold_data(cfg, 0, dataset, load_holdout_test(cfg))]
    n_folds = resolved_folds(cfg)
    logger.info(f"{n_folds}-fold evaluation on {dataset.name}: {dataset.N} points")
    splits = make_folds(dataset.N, n_folds, cfg.split_seed)
    return dataset.name, [
        _fold_data(cfg, split.fold_index, dataset.subset(split.train), dataset.subset(split.test))
        for split in splits
    ]


class CellScorer:
    """Scores predictive moments of one cell in the units of the raw test targets"""

    def __init__(self, spec: ModelSpec, data: FoldData):
        self.spec = spec
        self.data = data

    def regression(self, test_stats: PredictiveStats, train_mean: np.ndarray) -> Tuple[float, float, PredictiveStats, NoiseModel]:
        noise = noise_from_mean(self.data.train.Y, train_mean)
        if self.data.standardizer is not None:
            test_stats, noise = to_original_units(test_stats, noise, self.data.standardizer)
        y = self.data.test_y_raw
        return nll_gaussian(y, test_stats, noise), rmse(test_stats.mean, y), test_stats, noise

    def classification(self, test_stats: PredictiveStats) -> Tuple[float, float]:
        labels = self.data.test_y_raw
        return nll_classification(test_stats.probs, labels), accuracy(test_stats.probs, labels)


def _predictions(dataset: str, method: str, data: FoldData, stats: PredictiveStats,
                 noise: NoiseModel) -> List[PredictionRow]:
    std = np.sqrt(stats.var + noise.sigma2_noise)
    y = data.test_y_raw
    return [
        PredictionRow(dataset, method, data.fold, i, float(data.test_x_raw[i, 0]), float(y[i, 0]),
                      float(stats.mean[i, 0]), float(std[i, 0]))
        for i in range(y.shape[0])
    ]


class _RowEmitter:
    """Final row at the full ensemble size, trend rows for every prefix when trends are on"""

    def __init__(self, dataset: str, fold: int, seed: int, K0: int, trained: int, wall: float, trend: bool):
        self.dataset, self.fold, self.seed = dataset, fold, seed
        self.K0, self.trained, self.wall, self.trend = K0, trained, wall, trend

    def __call__(self, method: str, scores) -> List[ResultRow]:
        rows = []
        for size, (nll, metric) in scores.items():
            kinds = ([FINAL] if size == self.K0 else []) + ([TREND] if self.trend else [])
            rows.extend(
                ResultRow(self.dataset, method, self.fold, self.seed, nll, metric, size, self.trained, self.wall, kind)
                for kind in kinds
            )
        return rows


def _posterior_name(dataset: str, label: str, fold: int, index: int) -> str:
    return f"{dataset}_{(label or 'point').replace('+', '-')}_fold{fold}_model{index}.npz"


def run_cell(cfg: ExperimentConfig, dataset: str, data: FoldData, label: str,
             record_wall_time: bool = True, skip_failures: bool = False) -> CellResult:
    """Train, sample and score one (fold, method) cell"""
    mspec = cfg.marginalization(label, child_seed(cfg.seed, 'fold', data.fold))
    try:
        return _evaluate_cell(cfg, dataset, data, mspec, record_wall_time)
    except HypermarginalError as e:
        logger.error(f"Cell failed: fold {data.fold}, method {mspec.display_label}: {e}")
        if not skip_failures:
            raise CellFailure(data.fold, label, e) from e
        logger.warning(f"Skipping failed cell (fold {data.fold}, method {mspec.display_label})")
        return CellResult(failures=[FailureRow(dataset, mspec.display_label, data.fold, str(e))])


def _evaluate_cell(cfg: ExperimentConfig, dataset: str, data: FoldData, mspec: MarginalizationSpec,
                   record_wall_time: bool) -> CellResult:
    started = time.perf_counter()
    train = data.train
    spec = cfg.model_spec(train.n_inputs, train.n_outputs, resolved_hidden(cfg))
    base_h = cfg.base_hyperparams()
    if base_h.batch_size > train.N:
        base_h = base_h.with_batch(train.N)
    t = epochs_to_iterations(train.N, base_h.batch_size, cfg.epochs)

    models = train_models(
        mspec, spec, train, base_h, t,
        epochs=cfg.epochs,
        prior=cfg.hyper_prior() if mspec.selects(Variable.H) else None,
        selector=cfg.algorithm_selector() if mspec.selects(Variable.ALG) else None,
        trace_cfg=cfg.trace_config(),
        loss=cfg.loss_kind(),
    )
    trained = models_trained(mspec)
    samples = samples_from_models(mspec, spec, models)
    members = np.array([sample.member for sample in samples])
    K0 = mspec.count(Variable.THETA0)
    sizes = range(1, K0 + 1) if cfg.trend else [K0]

    scorer = CellScorer(spec, data)
    test_out = sample_outputs(spec, samples, data.test.X)
    train_out = None if spec.is_classifier else sample_outputs(spec, samples, train.X)

    method = mspec.display_label
    result = CellResult()
    scores = {}
    for size in sizes:
        keep = members < size
        test_stats = stats_from_outputs(test_out[keep], spec.is_classifier)
        if spec.is_classifier:
            nll, metric = scorer.classification(test_stats)
        else:
            train_mean = stats_from_outputs(train_out[keep]).mean
            nll, metric, test_stats, noise = scorer.regression(test_stats, train_mean)
            if size == K0 and cfg.predictions:
                result.predictions.extend(_predictions(dataset, method, data, test_stats, noise))
        scores[size] = (nll, metric)

    adf_scores = {}
    if cfg.adf and mspec.selects(Variable.T):
        adf_scores = _adf_scores(cfg, dataset, data, spec, models, sizes, scorer, result, method + ADF_SUFFIX)

    wall = time.perf_counter() - started if record_wall_time else 0.0
    emit = _RowEmitter(dataset, data.fold, cfg.seed, K0, trained, wall, cfg.trend)
    result.rows.extend(emit(method, scores))
    result.rows.extend(emit(method + ADF_SUFFIX, adf_scores))

    if cfg.save_posteriors and mspec.selects(Variable.T):
        result.posteriors = [
            (_posterior_name(dataset, mspec.label, data.fold, index), model.posterior)
            for index, model in enumerate(models)
        ]
    final_nll, final_metric = scores[K0]
    logger.info(f"fold {data.fold} [{method}]: nll={final_nll:.4f} metric={final_metric:.4f} "
                f"({trained} model(s), {len(samples)} sample(s))")
    return result


def _adf_scores(cfg: ExperimentConfig, dataset: str, data: FoldData, spec: ModelSpec,
                models: List[TrainedModel], sizes, scorer: CellScorer, result: CellResult, method: str):
    """Single-pass moments per SWAG posterior, mixed over the models of each ensemble prefix"""
    test_moments, train_moments = [], []
    for model in models:
        params = ParamMoments.from_posterior(model.posterior)
        test_moments.append(adf_forward(spec, params, data.test.X))
        train_moments.append(adf_forward(spec, params, data.train.X))
    members = [model.member for model in models]
    K0 = max(sizes)
    scores = {}
    for size in sizes:
        chosen = [i for i, member in enumerate(members) if member < size]
        test_stats = mixture_moments([test_moments[i].mean for i in chosen], [test_moments[i].var for i in chosen])
        train_stats = mixture_moments([train_moments[i].mean for i in chosen], [train_moments[i].var for i in chosen])
        nll, metric, test_stats, noise = scorer.regression(test_stats, train_stats.mean)
        if size == K0 and cfg.predictions:
            result.predictions.extend(_predictions(dataset, method, data, test_stats, noise))
        scores[size] = (nll, metric)
    return scores


class ExperimentRunner:
    """
    Runs every (fold, method) cell of a configuration. Cells are independent
    and are dispatched through joblib; results come back in cell order.
    """

    def __init__(self, cfg: ExperimentConfig, threads: Optional[int] = None,
                 skip_failures: bool = False, record_wall_time: Optional[bool] = None):
        self.cfg = cfg
        self.threads = threads or cfg.threads or 1
        self.skip_failures = skip_failures
        self.record_wall_time = cfg.record_wall_time if record_wall_time is None else record_wall_time
        if self.record_wall_time is None:
            self.record_wall_time = True
        self.predictions: List[PredictionRow] = []
        self.failures: List[FailureRow] = []
        self.posteriors: List[Tuple[str, SwagPosterior]] = []

    def cells(self, folds: List[FoldData]):
        return [(data, label) for data in folds for label in self.cfg.sweep]

    def run(self) -> List[ResultRow]:
        dataset, folds = prepare_folds(self.cfg)
        cells = self.cells(folds)
        logger.info(f"Running {len(cells)} cell(s) on {dataset} with {self.threads} worker(s)")
        outcomes = Parallel(n_jobs=self.threads)(
            delayed(run_cell)(self.cfg, dataset, data, label, self.record_wall_time, self.skip_failures)
            for data, label in cells
        )
        rows: List[ResultRow] = []
        for outcome in outcomes:
            rows.extend(outcome.rows)
            self.predictions.extend(outcome.predictions)
            self.failures.extend(outcome.failures)
            self.posteriors.extend(outcome.posteriors)
        if self.failures:
            logger.warning(f"{len(self.failures)} cell(s) failed and were skipped")
        return rows


def run_experiment(cfg: ExperimentConfig, threads: Optional[int] = None, skip_failures: bool = False,
                   record_wall_time: Optional[bool] = None) -> List[ResultRow]:
    return ExperimentRunner(cfg, threads, skip_failures, record_wall_time).run()
