"""Exception hierarchy for the ferrogate package."""


class FerrogateError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(FerrogateError, ValueError):
    """A parameter violates a type invariant (wrong sign, range, or shape)."""


class DomainError(FerrogateError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class BudgetError(FerrogateError):
    """A requested computation exceeds the configured size budget."""


class ConvergenceError(FerrogateError):
    """An iterative solver failed to converge; the message carries diagnostics."""


class ScheduleError(FerrogateError, ValueError):
    """A schedule file failed to parse.

    Attributes:
        line_number: 1-based line where the problem was found, or None.
    """

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class CalibrationError(FerrogateError):
    """Pulse calibration could not reach the target within its bounds/budget."""


class EdgeAmplitudeError(FerrogateError):
    """Wavefunction amplitude at the grid edge exceeded the configured bound."""
