"""Exception hierarchy shared by all modules."""


class ModelError(Exception):
    """Base class for every error raised by lanchester_ros."""


class DomainError(ModelError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoExtinctionError(ModelError):
    """The survival curve never reaches zero (no attrition)."""


class ConfigError(ModelError, ValueError):
    """Invalid run configuration, sweep, fit or schedule specification.

    ``key`` and ``line`` locate the offending entry when it came from a
    config document.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericBlowUpError(ModelError, ArithmeticError):
    """Integration produced a non-finite state."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"non-finite state at step {step}")


class EndOfDayError(ModelError):
    """Attempt to step an organism past minute 1440."""
