"""
Posterior checkpoints as .npz records (layout_version, d, mean, var, count)
"""
import logging
import os
import zipfile
from typing import Optional

import numpy as np

from errors import PosteriorFormatError
from .swag import SwagPosterior

logger = logging.getLogger(__name__)

LAYOUT_VERSION = 1
REQUIRED_KEYS = ('layout_version', 'd', 'mean', 'var', 'count')


def save_posterior(post: SwagPosterior, path: str) -> str:
    """Write post as .npz, creating parent directories; returns the path"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as fh:
        np.savez(fh, layout_version=np.int64(LAYOUT_VERSION), d=np.int64(post.d),
                 mean=post.mean, var=post.var, count=np.int64(post.count))
    logger.debug(f"Saved posterior (d={post.d}, count={post.count}) to {path}")
    return path


def load_posterior(path: str, expected_d: Optional[int] = None) -> SwagPosterior:
    """Read a posterior written by save_posterior, checking its dimension"""
    try:
        with np.load(path, allow_pickle=False) as record:
            missing = [key for key in REQUIRED_KEYS if key not in record.files]
            if missing:
                raise PosteriorFormatError(f"{path}: missing fields {', '.join(missing)}")
            version = int(record['layout_version'])
            d = int(record['d'])
            mean = np.array(record['mean'], dtype=np.float64)
            var = np.array(record['var'], dtype=np.float64)
            count = int(record['count'])
    except PosteriorFormatError:
        raise
    except (OSError, ValueError, zipfile.BadZipFile) as e:
        logger.error(f"Could not read posterior record {path}: {e}")
        raise PosteriorFormatError(f"{path}: unreadable posterior record ({e})") from e

    if version != LAYOUT_VERSION:
        raise PosteriorFormatError(f"{path}: layout version {version}, expected {LAYOUT_VERSION}")
    if mean.shape != (d,) or var.shape != (d,):
        raise PosteriorFormatError(f"{path}: mean/var lengths {mean.shape}/{var.shape} do not match d={d}")
    if expected_d is not None and d != expected_d:
        raise PosteriorFormatError(f"{path}: posterior has d={d}, model needs {expected_d}")
    try:
        return SwagPosterior(mean=mean, var=var, count=count)
    except ValueError as e:
        raise PosteriorFormatError(f"{path}: {e}") from e
