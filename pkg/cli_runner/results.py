"""
Result files of an experiment run: raw per-cell rows, per-method summaries,
ensemble-size trends, optional predictions, failures and SWAG posteriors.
"""
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from errors import OutputError, PreconditionError
from marginals import SwagPosterior, save_posterior
from .runner import FINAL, TREND, FailureRow, PredictionRow, ResultRow

logger = logging.getLogger(__name__)

RAW_FILE = 'results_raw.csv'
SUMMARY_FILE = 'results_summary.csv'
TREND_FILE = 'trend.csv'
PREDICTIONS_FILE = 'predictions.csv'
FAILURES_FILE = 'failures.csv'
POSTERIOR_DIR = 'posteriors'

RAW_COLUMNS = ['dataset', 'method', 'fold', 'seed', 'nll', 'metric', 'ensemble_size', 'models_trained', 'wall_time_s']
SUMMARY_COLUMNS = ['dataset', 'method', 'nll_mean', 'nll_std', 'metric_mean', 'metric_std']
TREND_COLUMNS = ['dataset', 'method', 'ensemble_size', 'nll', 'metric']
PREDICTION_COLUMNS = ['dataset', 'method', 'fold', 'index', 'x0', 'y', 'mean', 'std']
FAILURE_COLUMNS = ['dataset', 'method', 'fold', 'error']


def rows_frame(rows: Sequence, columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in rows], columns=columns)


def summarize(rows: Sequence[ResultRow]) -> pd.DataFrame:
    """Mean and population std over folds of every (dataset, method), in first-seen order"""
    df = rows_frame([row for row in rows if row.kind == FINAL], RAW_COLUMNS)
    grouped = df.groupby(['dataset', 'method'], sort=False)
    summary = grouped.agg(
        nll_mean=('nll', 'mean'),
        nll_std=('nll', lambda s: s.std(ddof=0)),
        metric_mean=('metric', 'mean'),
        metric_std=('metric', lambda s: s.std(ddof=0)),
    ).reset_index()
    return summary[SUMMARY_COLUMNS]


def trend_table(rows: Sequence[ResultRow]) -> pd.DataFrame:
    """Fold-averaged scores per ensemble size"""
    df = rows_frame([row for row in rows if row.kind == TREND], RAW_COLUMNS)
    if df.empty:
        return pd.DataFrame(columns=TREND_COLUMNS)
    grouped = df.groupby(['dataset', 'method', 'ensemble_size'], sort=False)
    return grouped.agg(nll=('nll', 'mean'), metric=('metric', 'mean')).reset_index()[TREND_COLUMNS]


def write_results(rows: Sequence[ResultRow], out_dir,
                  predictions: Optional[Sequence[PredictionRow]] = None,
                  failures: Optional[Sequence[FailureRow]] = None,
                  posteriors: Optional[Sequence[Tuple[str, SwagPosterior]]] = None) -> Dict[str, Path]:
    """Write every result file under out_dir and return the written paths by name"""
    finals = [row for row in rows if row.kind == FINAL]
    if not finals and not failures:
        raise PreconditionError("write_results needs at least one result row")

    out = Path(out_dir)
    written: Dict[str, Path] = {}
    try:
        out.mkdir(parents=True, exist_ok=True)
        written['raw'] = out / RAW_FILE
        rows_frame(finals, RAW_COLUMNS).to_csv(written['raw'], index=False)
        written['summary'] = out / SUMMARY_FILE
        summarize(rows).to_csv(written['summary'], index=False)

        if any(row.kind == TREND for row in rows):
            written['trend'] = out / TREND_FILE
            trend_table(rows).to_csv(written['trend'], index=False)
        if predictions:
            written['predictions'] = out / PREDICTIONS_FILE
            rows_frame(predictions, PREDICTION_COLUMNS).to_csv(written['predictions'], index=False)
        if failures:
            written['failures'] = out / FAILURES_FILE
            rows_frame(failures, FAILURE_COLUMNS).to_csv(written['failures'], index=False)
        if posteriors:
            posterior_dir = out / POSTERIOR_DIR
            posterior_dir.mkdir(exist_ok=True)
            for name, posterior in posteriors:
                save_posterior(posterior, posterior_dir / name)
            written['posteriors'] = posterior_dir
    except OSError as e:
        logger.error(f"Failed to write results to {out}: {str(e)}")
        raise OutputError(f"could not write results to {out}: {e}") from e

    logger.info(f"Wrote {len(finals)} result row(s) to {out}")
    return written
