"""Exception hierarchy shared by every fairad module.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, ``DataError`` -> 3,
``NumericError`` -> 4.
"""


class FairADError(Exception):
    """Base class for all errors raised by fairad."""


class ShapeError(FairADError, ValueError):
    """Array dimensions do not match what an operation expects."""


class NumericError(FairADError, ArithmeticError):
    """A non-finite value appeared where finite numbers are required."""

    def __init__(self, message, layer_index=None, epoch=None):
        super().__init__(message)
        self.layer_index = layer_index
        self.epoch = epoch


class DegenerateVectorError(FairADError, ValueError):
    """A zero-norm vector was passed to a cosine-based quantity."""


class InsufficientBatchError(FairADError, ValueError):
    """Too few rows to form the pairs a loss needs."""


class InsufficientGroupError(InsufficientBatchError):
    """A group has fewer rows than a pairwise term requires."""


class UndefinedMetricError(FairADError, ValueError):
    """A metric is undefined for the given labels (e.g. no positives)."""


class DomainError(FairADError, ValueError):
    """A value falls outside the domain of a conjugate function."""


class UnknownDivergenceError(FairADError, KeyError):
    """Requested divergence is not in the catalogue."""


class DataError(FairADError):
    """Base for dataset ingestion and sampling problems."""


class SchemaError(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ParseError(DataError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateDataError(DataError, ValueError):
    """Dataset cannot support the requested operation (empty group, constant features)."""


class CapacityError(DataError, ValueError):
    """Requested sample sizes exceed what the dataset holds."""


class ConfigError(FairADError, ValueError):
    """Experiment configuration failed validation."""
