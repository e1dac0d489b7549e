"""
Exception hierarchy shared by every hypermarginal module.
Library code raises these; only the command line turns them into exit codes.
"""
from typing import Optional


class HypermarginalError(Exception):
    """Base class for all errors raised by this package"""


class PreconditionError(HypermarginalError, ValueError):
    """An operation was called with arguments that violate its preconditions"""


class InputShapeError(PreconditionError):
    """Array dimensions do not match the model specification"""


class DivergenceError(HypermarginalError, RuntimeError):
    """Training produced a non-finite parameter or loss"""

    def __init__(self, iteration: int, member: Optional[int] = None, detail: str = ''):
        self.iteration = iteration
        self.member = member
        self.detail = detail
        where = f"iteration {iteration}"
        if member is not None:
            where = f"ensemble member {member}, {where}"
        message = f"Training diverged at {where}"
        if detail:
            message += f": {detail}"
        super().__init__(message)

    def for_member(self, member: int) -> 'DivergenceError':
        """Return a copy of this error that also names the ensemble member"""
        return DivergenceError(self.iteration, member=member, detail=self.detail)

    def __reduce__(self):
        return self.__class__, (self.iteration, self.member, self.detail)


class InsufficientTraceError(HypermarginalError, ValueError):
    """A training trace holds fewer iterates than a posterior fit needs"""


class PriorMisconfigurationError(HypermarginalError, ValueError):
    """A hyperparameter prior keeps producing invalid draws"""


class UnsupportedHeadError(HypermarginalError, ValueError):
    """The requested computation is not defined for this output head"""


class DatasetParseError(HypermarginalError, ValueError):
    """A delimited data file could not be turned into a numeric table"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.reason = message
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)

    def __reduce__(self):
        return self.__class__, (self.reason, self.row, self.column)


class ConfigError(HypermarginalError, ValueError):
    """An experiment configuration file is malformed or inconsistent"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.reason = message
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

    def __reduce__(self):
        return self.__class__, (self.reason, self.line)


class PosteriorFormatError(HypermarginalError, ValueError):
    """A serialized posterior record is unreadable or has the wrong layout"""


class OutputError(HypermarginalError):
    """Result files could not be written"""


class CellFailure(HypermarginalError, RuntimeError):
    """A (fold, method) cell of an experiment failed"""

    def __init__(self, fold: int, label: str, cause: Exception):
        self.fold = fold
        self.label = label
        self.cause = cause
        super().__init__(f"fold {fold}, method '{label or 'point'}': {cause}")

    def __reduce__(self):
        return self.__class__, (self.fold, self.label, self.cause)


__all__ = [
    'HypermarginalError',
    'PreconditionError',
    'InputShapeError',
    'DivergenceError',
    'InsufficientTraceError',
    'PriorMisconfigurationError',
    'UnsupportedHeadError',
    'DatasetParseError',
    'ConfigError',
    'PosteriorFormatError',
    'OutputError',
    'CellFailure',
]
