"""Exception hierarchy shared by every module of the package."""


class CMetricError(Exception):
    """Base class for all errors raised by cmetric."""


class ParseError(CMetricError):
    """Malformed trajectory input. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(CMetricError):
    """Input is well-formed but violates a dataset invariant."""


class ParameterError(CMetricError, ValueError):
    pass


class FrameRangeError(CMetricError, IndexError):
    pass


class AgentNotPresentError(CMetricError, KeyError):
    pass


class SeriesTooShortError(ParameterError):
    pass


class ConsistencyError(CMetricError):
    """Internal bookkeeping disagrees with its inputs (e.g. missing velocity)."""


class ConfigError(CMetricError):
    pass
