import os

import pytest

from cli_runner import ExperimentConfig, load_config, parse_config
from errors import ConfigError
from marginals import Variable
from optim import Algorithm, ScheduleKind
from tests.conftest import write_config

MINIMAL = """
[dataset]
kind = toy

[marginalization]
sweep = point, t, theta0+t
t = 4
"""


def test_defaults():
    cfg = ExperimentConfig()
    assert cfg.epochs == 40 and cfg.batch_size == 32
    assert cfg.sweep == ('',)
    assert cfg.protocol_mode == 'holdout'
    assert cfg.counts[Variable.THETA0] == 5


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert cfg.sweep == ('', 't', 't+theta0')
    assert cfg.counts[Variable.T] == 4
    assert cfg.counts[Variable.H] == 5
    assert not cfg.classification


def test_comments_and_case():
    cfg = parse_config("# experiment\n; note\n[TRAINING]\nEpochs = 3\n")
    assert cfg.epochs == 3


def test_typed_sections():
    cfg = parse_config("""
[dataset]
kind = two_blob
train_size = 40
[model]
hidden = 8, 8
dropout_rate = 0.1
[training]
algorithm = adam
schedule = swa_ramp
alpha_u = 0.1
alpha_l = 0.01
trace_cadence = 5
[hyper]
prior = grid
grid = 0.04:1, 0.05:6
[algorithms]
candidates = sgd, adam
weights = 0.25, 0.75
[marginalization]
sweep = h, alg
""")
    assert cfg.classification
    assert cfg.hidden == (8, 8)
    assert cfg.model_spec(2, 2).layer_sizes == (2, 8, 8, 2)
    hp = cfg.base_hyperparams()
    assert hp.algorithm == Algorithm.ADAM and hp.lr.kind == ScheduleKind.SWA_RAMP
    assert cfg.trace_config().cadence == 5
    assert cfg.hyper_prior().grid == ((0.04, 1), (0.05, 6))
    assert len(cfg.algorithm_selector().candidates) == 2


@pytest.mark.parametrize('text, line', [
    ("[training]\nepochs = 0\n", 2),
    ("[training]\n\nepochs = abc\n", 3),
    ("[nonsense]\n", 1),
    ("[training]\nfoo = 1\n", 2),
    ("[training]\nepochs = 2\nepochs = 3\n", 3),
    ("[training]\nepochs 3\n", 2),
    ("epochs = 3\n", 1),
    ("[marginalization]\nsweep = t+bogus\n", 2),
    ("[marginalization]\nsweep = t, t\n", 2),
])
def test_errors_cite_line(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_swa_ramp_needs_ordered_rates():
    with pytest.raises(ConfigError):
        parse_config("[training]\nschedule = swa_ramp\nalpha_u = 0.01\nalpha_l = 0.1\n")


def test_grid_prior_needs_points():
    with pytest.raises(ConfigError):
        parse_config("[hyper]\nprior = grid\n[marginalization]\nsweep = h\n")


def test_alg_needs_candidates():
    with pytest.raises(ConfigError) as info:
        parse_config("[marginalization]\nsweep = alg\n")
    assert info.value.line == 2


def test_candidate_lr_length():
    with pytest.raises(ConfigError):
        parse_config("[algorithms]\ncandidates = sgd, adam\nlr = 0.1\n")


def test_dataset_consistency():
    with pytest.raises(ConfigError):
        parse_config("[dataset]\nkind = file\n")
    with pytest.raises(ConfigError):
        parse_config("[dataset]\nkind = uci\nname = mnist\ndata_dir = data\n")
    with pytest.raises(ConfigError):
        parse_config("[dataset]\nkind = two_blob\n[training]\nloss = mse\n")
    with pytest.raises(ConfigError):
        parse_config("[dataset]\nkind = two_blob\n[marginalization]\nadf = true\n")
    with pytest.raises(ConfigError):
        parse_config("[dataset]\nkind = file\npath = x.csv\n[protocol]\nmode = holdout\n")


def test_multi_target_regression_needs_one_output():
    with pytest.raises(ConfigError) as info:
        parse_config("[dataset]\nkind = file\npath = x.csv\ntarget_cols = 2\n[protocol]\nstandardize = true\n")
    assert info.value.line == 4
    cfg = parse_config("[dataset]\nkind = file\npath = x.csv\ntarget_cols = 2\ntarget_select = 1\n")
    assert cfg.target_select == 1


def test_relative_paths_resolve_against_config(tmp_path):
    path = write_config(tmp_path, "[dataset]\nkind = file\npath = data/points.csv\n")
    cfg = load_config(path)
    assert cfg.dataset_path == os.path.join(str(tmp_path), 'data', 'points.csv')
    assert cfg.protocol_mode == 'folds'


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / 'absent.ini'))


def test_overrides_skip_none():
    cfg = parse_config(MINIMAL).with_overrides(seed=7, threads=None)
    assert cfg.seed == 7 and cfg.threads is None


def test_shipped_configs_parse():
    root = os.path.join(os.path.dirname(__file__), '..', 'configs')
    for name in sorted(os.listdir(root)):
        if name.endswith('.ini') and not name.startswith('uci'):
            load_config(os.path.join(root, name))
