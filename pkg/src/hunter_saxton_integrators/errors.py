"""
Exceptions raised by the integrators.

Two families exist: ``ValidationError`` for bad input and configuration, and
``NumericalError`` for failures while computing. The command line maps them to
exit codes 2 and 3 through the ``exit_code`` attribute.
"""


class IntegratorError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(IntegratorError, ValueError):
    """An argument or configuration value is outside its domain."""

    exit_code = 2


class ConfigParseError(ValidationError):
    """A configuration file line could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParameterOrderError(ValidationError):
    """Travelling-wave parameters violate their required ordering."""


class SizeLimitError(ValidationError):
    """A dense computation was requested above its size cap."""


class MissingGhostError(ValidationError):
    """A stencil reached a ghost value that the boundary rule leaves undefined."""


class NumericalError(IntegratorError, RuntimeError):
    """A numerical computation failed."""

    exit_code = 3


class NoConvergenceError(NumericalError):
    """The nonlinear solver hit its iteration cap."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class SingularJacobianError(NumericalError):
    """The Newton linear system could not be solved."""


class SingularSystemError(NumericalError):
    """A linear boundary-value solve inside a scheme failed."""


class NonFiniteError(NumericalError):
    """A NaN or infinity appeared in a field."""

    def __init__(self, message: str, t: float | None = None, step: int | None = None):
        self.t = t
        self.step = step
        super().__init__(message)


class PeriodNotFoundError(NumericalError):
    """The travelling-wave integration did not close an orbit within its budget."""


class SimulationFailed(NumericalError):
    """
    A time-stepping run stopped early.

    ``step`` is the index of the step that failed and ``result`` holds
    everything recorded before it; the original error is the ``__cause__``.
    """

    def __init__(self, message: str, step: int, result=None):
        self.step = step
        self.result = result
        super().__init__(message)
