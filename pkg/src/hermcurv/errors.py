"""Exception types raised across the package."""


class HermcurvError(Exception):
    """Base class for all package errors."""


class SingularMetric(HermcurvError):
    pass


class NonPositiveDefinite(HermcurvError):
    pass


class IncompatibleIndices(HermcurvError):
    pass


class PointOutsideChart(HermcurvError):
    pass


class ZeroVector(HermcurvError):
    pass


class ConsistencyFailure(HermcurvError):
    """Two routes to the same quantity disagree beyond tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateFit(HermcurvError):
    pass


class InvalidParameter(HermcurvError):
    pass


class OutOfRange(HermcurvError):
    pass


class ConfigError(HermcurvError):
    pass


class DslError(HermcurvError):
    """Metric-file problem carrying an optional source location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class DslSyntaxError(DslError):
    pass


class DimensionError(DslError):
    pass


class NonHermitianEntry(DslError):
    pass


class DslEvaluationError(DslError):
    pass


class ReportIOError(HermcurvError):
    """A report or table could not be written."""
