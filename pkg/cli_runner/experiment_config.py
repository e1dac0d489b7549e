"""
Experiment configuration files.

The format is line oriented: `[section]` headers followed by `key = value`
lines. Blank lines and lines starting with `#` or `;` are ignored. Every key
is typed and checked against SECTIONS; errors name the offending line.
See docs/config_format.md for the key reference.
"""
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Tuple

from data_bench import UCI_PRESETS
from errors import ConfigError, HypermarginalError
from marginals import DEFAULT_COUNTS, HyperPrior, MarginalizationSpec, PriorKind, Variable
from nn_core import LossKind, ModelSpec, make_spec
from optim import (
    Algorithm,
    AlgorithmSelector,
    BatchMode,
    HyperParams,
    ScheduleKind,
    ScheduleSpec,
    TraceConfig,
    TraceMode,
)

logger = logging.getLogger(__name__)

DATASET_KINDS = ('toy', 'two_blob', 'file', 'uci')
SYNTHETIC_KINDS = ('toy', 'two_blob')


# value parsers: each takes the raw string and returns the typed value or raises ValueError

def _int(raw: str) -> int:
    return int(raw)


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError(f"expected a positive integer, got {raw}")
    return value


def _nonnegative_int(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise ValueError(f"expected a nonnegative integer, got {raw}")
    return value


def _seed(raw: str) -> int:
    value = int(raw)
    if not 0 <= value < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {raw}")
    return value


def _positive_float(raw: str) -> float:
    value = float(raw)
    if not value > 0:
        raise ValueError(f"expected a positive number, got {raw}")
    return value


def _float(raw: str) -> float:
    return float(raw)


def _bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ('true', 'yes', 'on', '1'):
        return True
    if lowered in ('false', 'no', 'off', '0'):
        return False
    raise ValueError(f"expected true or false, got {raw}")


def _text(raw: str) -> str:
    if not raw:
        raise ValueError("expected a value")
    return raw


def _choice(*options: str) -> Callable[[str], str]:
    def parse(raw: str) -> str:
        if raw not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {raw!r}")
        return raw
    return parse


def _items(raw: str) -> Tuple[str, ...]:
    return tuple(item.strip() for item in raw.split(','))


def _int_list(raw: str) -> Tuple[int, ...]:
    return tuple(_positive_int(item) for item in _items(raw))


def _float_list(raw: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in _items(raw))


def _range(raw: str) -> Tuple[float, float]:
    low, high = _float_list(raw) if ',' in raw else (None, None)
    if low is None or low > high:
        raise ValueError(f"expected 'low, high' with low <= high, got {raw!r}")
    return low, high


def _grid(raw: str) -> Tuple[Tuple[float, int], ...]:
    points = []
    for item in _items(raw):
        alpha, sep, batch = item.partition(':')
        if not sep:
            raise ValueError(f"grid points are written alpha:batch_size, got {item!r}")
        points.append((_positive_float(alpha.strip()), _positive_int(batch.strip())))
    return tuple(points)


def _cadence(raw: str):
    return 'epoch' if raw == 'epoch' else _positive_int(raw)


def _delimiter(raw: str) -> Optional[str]:
    named = {'auto': None, 'comma': ',', 'whitespace': 'whitespace', 'tab': '\t', 'semicolon': ';'}
    if raw in named:
        return named[raw]
    if len(raw) != 1:
        raise ValueError(f"delimiter must be auto, comma, whitespace, tab, semicolon or one character, got {raw!r}")
    return raw


def _labels(raw: str) -> Tuple[str, ...]:
    labels = []
    for item in _items(raw):
        labels.append(MarginalizationSpec.from_label(item).label)
    if len(set(labels)) != len(labels):
        raise ValueError("sweep lists the same method twice")
    return tuple(labels)


SECTIONS: Dict[str, Dict[str, Callable[[str], Any]]] = {
    'dataset': {
        'kind': _choice(*DATASET_KINDS),
        'path': _text,
        'name': _text,
        'data_dir': _text,
        'target_cols': _positive_int,
        'target_select': _nonnegative_int,
        'delimiter': _delimiter,
        'train_size': _positive_int,
        'test_size': _positive_int,
        'seed': _seed,
    },
    'model': {
        'hidden': _int_list,
        'activation': _choice('relu', 'identity'),
        'dropout_rate': _float,
    },
    'training': {
        'algorithm': _choice(*(a.value for a in Algorithm)),
        'epochs': _int,
        'lr': _positive_float,
        'schedule': _choice(*(k.value for k in ScheduleKind)),
        'alpha_u': _positive_float,
        'alpha_l': _positive_float,
        'batch_size': _positive_int,
        'batch_mode': _choice(*(m.value for m in BatchMode)),
        'adam_beta1': _float,
        'adam_beta2': _float,
        'adam_eps': _float,
        'loss': _choice(*(k.value for k in LossKind)),
        'trace_cadence': _cadence,
        'trace_burn_in': _nonnegative_int,
        'trace_mode': _choice(*(m.value for m in TraceMode)),
    },
    'hyper': {
        'prior': _choice(*(k.value for k in PriorKind)),
        'lr_mean': _positive_float,
        'lr_std_ratio': _float,
        'alpha_u_range': _range,
        'alpha_l_range': _range,
        'grid': _grid,
        'cross_product': _bool,
    },
    'algorithms': {
        'candidates': lambda raw: tuple(_choice(*(a.value for a in Algorithm))(item) for item in _items(raw)),
        'weights': _float_list,
        'lr': lambda raw: tuple(_positive_float(item) for item in _items(raw)),
    },
    'marginalization': {
        'sweep': _labels,
        't': _positive_int,
        'theta0': _positive_int,
        'h': _positive_int,
        'm_theta': _positive_int,
        'alg': _positive_int,
        'adf': _bool,
    },
    'protocol': {
        'mode': _choice('folds', 'holdout'),
        'folds': _int,
        'split_seed': _seed,
        'seed': _seed,
        'standardize': _bool,
    },
    'output': {
        'dir': _text,
        'trend': _bool,
        'predictions': _bool,
        'save_posteriors': _bool,
        'record_wall_time': _bool,
        'threads': _positive_int,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; every field has its documented default"""
    # [dataset]
    dataset_kind: str = 'toy'
    dataset_path: Optional[str] = None
    dataset_name: Optional[str] = None
    data_dir: Optional[str] = None
    target_cols: int = 1
    target_select: Optional[int] = None
    delimiter: Optional[str] = None
    train_size: Optional[int] = None
    test_size: Optional[int] = None
    data_seed: Optional[int] = None
    # [model]
    hidden: Optional[Tuple[int, ...]] = None
    activation: str = 'relu'
    dropout_rate: float = 0.0
    # [training]
    algorithm: str = 'sgd'
    epochs: int = 40
    lr: float = 0.01
    schedule: str = 'constant'
    alpha_u: Optional[float] = None
    alpha_l: Optional[float] = None
    batch_size: int = 32
    batch_mode: str = 'epoch_shuffle'
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    loss: Optional[str] = None
    trace_cadence: Any = 'epoch'
    trace_burn_in: Optional[int] = None
    trace_mode: str = 'snapshots'
    # [hyper]
    prior: str = 'fixed'
    lr_mean: Optional[float] = None
    lr_std_ratio: float = 0.01
    alpha_u_range: Optional[Tuple[float, float]] = None
    alpha_l_range: Optional[Tuple[float, float]] = None
    grid: Tuple[Tuple[float, int], ...] = ()
    cross_product: bool = False
    # [algorithms]
    candidates: Tuple[str, ...] = ()
    candidate_weights: Tuple[float, ...] = ()
    candidate_lr: Tuple[float, ...] = ()
    # [marginalization]
    sweep: Tuple[str, ...] = ('',)
    counts: Dict[Variable, int] = field(default_factory=lambda: dict(DEFAULT_COUNTS))
    adf: bool = False
    # [protocol]
    mode: Optional[str] = None
    n_folds: Optional[int] = None
    split_seed: int = 0
    seed: int = 0
    standardize: bool = True
    # [output]
    out_dir: Optional[str] = None
    trend: bool = True
    predictions: bool = False
    save_posteriors: bool = False
    record_wall_time: Optional[bool] = None
    threads: Optional[int] = None

    @property
    def classification(self) -> bool:
        return self.dataset_kind == 'two_blob'

    @property
    def protocol_mode(self) -> str:
        if self.mode is not None:
            return self.mode
        return 'holdout' if self.dataset_kind in SYNTHETIC_KINDS else 'folds'

    def model_spec(self, n_inputs: int, n_outputs: int, hidden: Tuple[int, ...] = (50,)) -> ModelSpec:
        layers = (n_inputs, *(self.hidden or hidden), n_outputs)
        head = 'classification_softmax' if self.classification else 'regression_identity'
        return make_spec(layers, self.activation, head, self.dropout_rate)

    def schedule_spec(self) -> ScheduleSpec:
        if self.schedule == ScheduleKind.SWA_RAMP.value:
            return ScheduleSpec.swa_ramp(self.alpha_u, self.alpha_l, self.epochs)
        return ScheduleSpec.constant(self.lr)

    def base_hyperparams(self) -> HyperParams:
        return HyperParams(
            algorithm=Algorithm(self.algorithm),
            lr=self.schedule_spec(),
            batch_size=self.batch_size,
            batch_mode=BatchMode(self.batch_mode),
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_eps=self.adam_eps,
        )

    def hyper_prior(self) -> HyperPrior:
        return HyperPrior(
            kind=PriorKind(self.prior),
            template=self.base_hyperparams(),
            lr_mean=self.lr_mean,
            lr_std_ratio=self.lr_std_ratio,
            alpha_u_range=self.alpha_u_range,
            alpha_l_range=self.alpha_l_range,
            n_e=self.epochs,
            grid=self.grid,
        )

    def algorithm_selector(self) -> Optional[AlgorithmSelector]:
        if not self.candidates:
            return None
        base = self.base_hyperparams()
        templates = []
        for index, name in enumerate(self.candidates):
            template = replace(base, algorithm=Algorithm(name))
            if self.candidate_lr:
                template = template.with_lr(ScheduleSpec.constant(self.candidate_lr[index]))
            templates.append(template)
        if self.candidate_weights:
            return AlgorithmSelector(tuple(templates), self.candidate_weights)
        return AlgorithmSelector.uniform(templates)

    def trace_config(self) -> TraceConfig:
        return TraceConfig(cadence=self.trace_cadence, burn_in=self.trace_burn_in, mode=TraceMode(self.trace_mode))

    def loss_kind(self) -> Optional[LossKind]:
        return None if self.loss is None else LossKind(self.loss)

    def marginalization(self, label: str, master_seed: int) -> MarginalizationSpec:
        return MarginalizationSpec.from_label(label, self.counts, master_seed, self.cross_product)

    def with_overrides(self, **changes) -> 'ExperimentConfig':
        return replace(self, **{key: value for key, value in changes.items() if value is not None})


# config key -> ExperimentConfig field, where the names differ
FIELD_NAMES = {
    ('dataset', 'kind'): 'dataset_kind',
    ('dataset', 'path'): 'dataset_path',
    ('dataset', 'name'): 'dataset_name',
    ('dataset', 'seed'): 'data_seed',
    ('algorithms', 'weights'): 'candidate_weights',
    ('algorithms', 'lr'): 'candidate_lr',
    ('protocol', 'folds'): 'n_folds',
    ('output', 'dir'): 'out_dir',
}
COUNT_KEYS = {v.value for v in Variable}


def _read_lines(text: str):
    """Yield (line number, section, key, raw value)"""
    section = None
    seen = set()
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in '#;':
            continue
        if stripped.startswith('['):
            if not stripped.endswith(']'):
                raise ConfigError(f"malformed section header {stripped!r}", number)
            section = stripped[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}] (known: {', '.join(SECTIONS)})", number)
            continue
        key, sep, value = stripped.partition('=')
        if not sep:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", number)
        key = key.strip().lower()
        if section is None:
            raise ConfigError(f"key '{key}' appears before any [section] header", number)
        if key not in SECTIONS[section]:
            raise ConfigError(f"unknown key '{key}' in [{section}]", number)
        if (section, key) in seen:
            raise ConfigError(f"key '{key}' given twice in [{section}]", number)
        seen.add((section, key))
        yield number, section, key, value.strip()


def parse_config(text: str, base_dir: Optional[str] = None) -> ExperimentConfig:
    """
    Parse and validate configuration text. Relative dataset paths resolve
    against base_dir (the config file's directory).
    """
    values: Dict[str, Any] = {}
    counts = dict(DEFAULT_COUNTS)
    lines: Dict[str, int] = {}
    for number, section, key, raw in _read_lines(text):
        try:
            value = SECTIONS[section][key](raw)
        except (ValueError, HypermarginalError) as e:
            raise ConfigError(f"[{section}] {key}: {e}", number) from e
        if section == 'marginalization' and key in COUNT_KEYS:
            counts[Variable(key)] = value
            lines[key] = number
            continue
        name = FIELD_NAMES.get((section, key), key)
        values[name] = value
        lines[name] = number

    for name in ('dataset_path', 'data_dir'):
        if name in values and base_dir and not os.path.isabs(values[name]):
            values[name] = os.path.normpath(os.path.join(base_dir, values[name]))

    cfg = ExperimentConfig(counts=counts, **values)
    _validate(cfg, lines)
    logger.info(f"Parsed experiment config: dataset={cfg.dataset_kind}, "
                f"sweep={[label or 'point' for label in cfg.sweep]}, epochs={cfg.epochs}")
    return cfg


def _validate(cfg: ExperimentConfig, lines: Dict[str, int]):
    def fail(message: str, *names: str):
        line = next((lines[name] for name in names if name in lines), None)
        raise ConfigError(message, line)

    if cfg.epochs < 1:
        fail(f"epochs must be >= 1, got {cfg.epochs}", 'epochs')
    if cfg.n_folds is not None and cfg.n_folds < 2:
        fail(f"folds must be >= 2, got {cfg.n_folds}", 'n_folds')
    if not 0.0 <= cfg.dropout_rate < 1.0:
        fail(f"dropout_rate must lie in [0, 1), got {cfg.dropout_rate}", 'dropout_rate')

    if cfg.dataset_kind == 'file' and not cfg.dataset_path:
        fail("dataset kind 'file' needs a path", 'dataset_kind')
    if cfg.dataset_kind == 'uci':
        if cfg.dataset_name not in UCI_PRESETS:
            fail(f"dataset kind 'uci' needs name = one of {', '.join(sorted(UCI_PRESETS))}",
                 'dataset_name', 'dataset_kind')
        if not cfg.data_dir:
            fail("dataset kind 'uci' needs data_dir", 'dataset_kind')
    if cfg.target_select is not None and cfg.target_select >= cfg.target_cols:
        fail(f"target_select must be < target_cols={cfg.target_cols}", 'target_select')
    # the regression scorer carries one noise variance, so one output column
    if not cfg.classification and cfg.target_cols > 1 and cfg.target_select is None:
        fail(f"regression scores a single output; set target_select for target_cols={cfg.target_cols}",
             'target_cols')
    if cfg.protocol_mode == 'holdout' and cfg.dataset_kind not in SYNTHETIC_KINDS:
        fail("holdout evaluation needs a synthetic dataset (toy or two_blob)", 'mode')
    if cfg.train_size is not None and cfg.dataset_kind == 'two_blob' and cfg.train_size % 2:
        fail("two_blob train_size must be even", 'train_size')

    if cfg.classification and cfg.loss == LossKind.MSE.value:
        fail("two_blob is a classification dataset; use loss = cross_entropy", 'loss')
    if not cfg.classification and cfg.loss == LossKind.CROSS_ENTROPY.value:
        fail("cross_entropy needs a classification dataset", 'loss')

    try:
        cfg.base_hyperparams()
    except HypermarginalError as e:
        fail(str(e), 'alpha_u', 'alpha_l', 'schedule', 'adam_beta1', 'adam_beta2', 'adam_eps')
    try:
        cfg.trace_config()
    except HypermarginalError as e:
        fail(str(e), 'trace_cadence', 'trace_burn_in')

    labels = [MarginalizationSpec.from_label(label) for label in cfg.sweep]
    if any(m.selects(Variable.H) for m in labels):
        try:
            cfg.hyper_prior()
        except HypermarginalError as e:
            fail(str(e), 'prior', 'sweep')
    if any(m.selects(Variable.ALG) for m in labels):
        if not cfg.candidates:
            fail("sweep marginalises alg but [algorithms] lists no candidates", 'sweep')
    if cfg.candidates:
        if cfg.candidate_lr and len(cfg.candidate_lr) != len(cfg.candidates):
            fail("[algorithms] lr needs one value per candidate", 'candidate_lr')
        try:
            cfg.algorithm_selector()
        except HypermarginalError as e:
            fail(str(e), 'candidate_weights', 'candidates')
    if cfg.adf and cfg.classification:
        fail("adf rows are only defined for regression datasets", 'adf')


def load_config(path: str) -> ExperimentConfig:
    """Parse the file at path; relative paths inside resolve against its directory"""
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    logger.info(f"Loading experiment config from {path}")
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))
