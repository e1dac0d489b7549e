"""
Reader for delimited numeric tables (UCI-style benchmark files)
Targets are the last target_cols columns; an optional header row is skipped.
"""
import logging
import os
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from errors import DatasetParseError
from .datasets import Dataset

logger = logging.getLogger(__name__)

WHITESPACE = 'whitespace'


class DelimitedReader:
    """Reads and validates a delimited numeric file into a Dataset"""

    def __init__(self, target_cols: int = 1, delimiter: Optional[str] = None,
                 target_select: Optional[int] = None):
        if target_cols < 1:
            raise DatasetParseError(f"target_cols must be >= 1, got {target_cols}")
        if target_select is not None and not 0 <= target_select < target_cols:
            raise DatasetParseError(f"target_select must lie in [0, {target_cols}), got {target_select}")
        self.target_cols = target_cols
        self.delimiter = delimiter
        self.target_select = target_select
        self.warnings = []

    def detect_delimiter(self, first_line: str) -> str:
        if self.delimiter is not None:
            return self.delimiter
        return ',' if ',' in first_line else WHITESPACE

    @staticmethod
    def split(line: str, delimiter: str) -> List[str]:
        if delimiter == WHITESPACE:
            return line.split()
        return [cell.strip() for cell in line.split(delimiter)]

    def _rows(self, path: str) -> Tuple[List[int], List[List[str]]]:
        try:
            with open(path, 'r', encoding='utf-8') as fh:
                lines = [(number, line.strip()) for number, line in enumerate(fh, start=1)]
        except (OSError, UnicodeDecodeError) as e:
            logger.error(f"Cannot read {path}: {e}")
            raise DatasetParseError(f"cannot read {path}: {e}") from e
        lines = [(number, line) for number, line in lines if line]
        if not lines:
            raise DatasetParseError(f"{path} is empty")

        delimiter = self.detect_delimiter(lines[0][1])
        numbers = [number for number, _ in lines]
        rows = [self.split(line, delimiter) for _, line in lines]

        width = len(rows[0])
        for number, row in zip(numbers, rows):
            if len(row) != width:
                raise DatasetParseError(f"expected {width} columns, found {len(row)}", row=number)
        return numbers, rows

    def read(self, path: str) -> Dataset:
        logger.info(f"Reading delimited dataset: {path}")
        numbers, rows = self._rows(path)

        frame = pd.DataFrame(rows)
        numeric = frame.apply(pd.to_numeric, errors='coerce')

        # header: a first row with no numeric cell, followed by data
        if numeric.iloc[0].isna().all() and len(rows) > 1:
            message = f"Skipping header row: {', '.join(rows[0])}"
            logger.warning(message)
            self.warnings.append(message)
            numeric = numeric.iloc[1:]
            numbers = numbers[1:]

        values = numeric.to_numpy(dtype=np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            row, column = np.argwhere(bad)[0]
            raise DatasetParseError("non-numeric or non-finite value", row=numbers[row], column=int(column) + 1)

        width = values.shape[1]
        if width <= self.target_cols:
            raise DatasetParseError(
                f"{width} columns leave no inputs with {self.target_cols} target column(s)")
        X = values[:, :width - self.target_cols]
        Y = values[:, width - self.target_cols:]
        if self.target_select is not None:
            Y = Y[:, [self.target_select]]
        name = os.path.splitext(os.path.basename(path))[0]
        logger.info(f"Loaded {X.shape[0]} rows with {X.shape[1]} inputs and {Y.shape[1]} target(s) from {path}")
        return Dataset(X, Y, name=name)


def load_delimited(path: str, target_cols: int = 1, delimiter: Optional[str] = None,
                   target_select: Optional[int] = None) -> Dataset:
    return DelimitedReader(target_cols, delimiter, target_select).read(path)
