"""Command-line surface: `run` executes an experiment config, `validate` only parses it"""
import logging
import sys

import click

from app import configure_logging, create_runner
from config import get_config
from errors import ConfigError, HypermarginalError
from .experiment_config import load_config
from .results import write_results

logger = logging.getLogger(__name__)

U64 = click.IntRange(0, 2 ** 64 - 1)


def _fail(message: str, status: int):
    logger.error(message)
    click.echo(f"error: {message}", err=True)
    sys.exit(status)


@click.group()
@click.option('--env', default=None, help='Settings profile (development, production, testing).')
@click.pass_context
def cli(ctx, env):
    """Hyperparameter-marginalisation uncertainty experiments."""
    settings = get_config(env)
    configure_logging(settings)
    ctx.obj = settings


@cli.command()
@click.argument('config_path', type=click.Path(dir_okay=False))
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None, help='Output directory.')
@click.option('--seed', type=U64, default=None, help='Master seed (overrides the config).')
@click.option('--threads', type=int, default=None, help='Parallel cells (-1 for all cores).')
@click.option('--skip-failures', is_flag=True, help='Record failing cells in failures.csv and continue.')
@click.pass_obj
def run(settings, config_path, out_dir, seed, threads, skip_failures):
    """Run every fold and sweep label of CONFIG_PATH and write the result tables."""
    try:
        cfg = load_config(config_path).with_overrides(seed=seed, threads=threads, out_dir=out_dir)
        logger.info(f"Loaded config {config_path} (seed {cfg.seed})")
        runner = create_runner(cfg, settings, skip_failures=skip_failures)
        rows = runner.run()
        destination = cfg.out_dir or settings.OUTPUT_DIR
        written = write_results(rows, destination, runner.predictions, runner.failures, runner.posteriors)
    except HypermarginalError as e:
        _fail(str(e), 1)
    for name, path in written.items():
        click.echo(f"{name}: {path}")


@cli.command()
@click.argument('config_path', type=click.Path(dir_okay=False))
def validate(config_path):
    """Parse CONFIG_PATH and report the first problem, if any."""
    try:
        cfg = load_config(config_path)
    except ConfigError as e:
        _fail(str(e), 2)
    except HypermarginalError as e:
        _fail(str(e), 1)
    click.echo(f"{config_path}: ok ({cfg.dataset_kind}, {len(cfg.sweep)} label(s))")
