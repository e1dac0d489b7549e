"""Application wiring: logging setup and experiment runner construction"""
import logging
import sys

from config import get_config

logger = logging.getLogger(__name__)


def configure_logging(settings=None):
    """Configure root logging from the environment settings"""
    settings = settings or get_config()
    handlers = [logging.StreamHandler(sys.stdout)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, str(settings.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )
    logger.debug(f"Logging configured at {settings.LOG_LEVEL}")


def create_runner(cfg, settings=None, threads=None, skip_failures=False):
    """
    Build an ExperimentRunner for a parsed experiment config. Values set on
    the command line win over the config file, which wins over the
    environment settings.
    """
    from cli_runner import ExperimentRunner

    settings = settings or get_config()
    threads = threads or cfg.threads or settings.THREADS
    record_wall_time = cfg.record_wall_time
    if record_wall_time is None:
        record_wall_time = settings.RECORD_WALL_TIME
    logger.info(f"Creating runner for {cfg.dataset_kind} dataset, sweep {list(cfg.sweep)}")
    return ExperimentRunner(cfg, threads=threads, skip_failures=skip_failures,
                            record_wall_time=record_wall_time)
