"""Exception hierarchy.

``InputError`` covers anything wrong with what the caller handed us (files,
flags, shapes); ``NumericError`` covers failures of the linear algebra itself.
The CLI maps the two families to exit codes 1 and 2.
"""


class MapcaError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MapcaError, ValueError):
    pass


class NumericError(MapcaError, ArithmeticError):
    pass


class DimensionMismatchError(InputError):
    pass


class MetricSpecError(InputError):
    pass


class CsvParseError(InputError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class NonFiniteValueError(CsvParseError):
    pass


class TooFewRowsError(InputError):
    pass


class NotPositiveDefiniteError(NumericError):
    """Raised when a matrix that must be SPD has ``lambda_min <= floor``."""

    def __init__(self, message, min_eigenvalue, floor=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.floor = floor


class SingularMetricError(NotPositiveDefiniteError):
    """A fractional or negative power was requested of a (near-)singular matrix."""

    def __init__(self, message, eigenvalue, index, floor=None):
        super().__init__(message, eigenvalue, floor)
        self.eigenvalue = eigenvalue
        self.index = index


class ConvergenceError(NumericError):
    def __init__(self, message, off_diagonal_residual, sweeps):
        super().__init__(message)
        self.off_diagonal_residual = off_diagonal_residual
        self.sweeps = sweeps


class DegenerateVariableError(NumericError):
    """A variable has zero (or negative) marginal variance."""

    def __init__(self, message, column):
        super().__init__(message)
        self.column = column
