"""
Exception hierarchy shared by the library and the command line app.

Every error carries enough context to print a one-line message; the CLI maps
each class to an exit code (see EXIT_CODES).
"""


class YoccozError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(YoccozError, ValueError):
    """Malformed user input (bad angle string, invalid (p, q), unknown preset...)."""


class PreconditionError(YoccozError):
    """An operation was called outside its domain (e.g. alpha not repelling)."""


class OnBoundaryError(PreconditionError):
    """A point fell inside the tolerance band of a piece boundary."""

    def __init__(self, message: str, point: complex = None, label: str = None):
        super().__init__(message)
        self.point = point
        self.label = label


class NumericError(YoccozError):
    """Solver did not converge or tracing lost precision."""

    def __init__(self, message: str, residual: float = None):
        super().__init__(message)
        self.residual = residual


class InternalError(YoccozError):
    """An internal invariant was violated (duplicate cycles, overlapping pieces)."""


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

EXIT_CODES = {
    ArgumentError: EXIT_USAGE,
    PreconditionError: EXIT_USAGE,
    NumericError: EXIT_NUMERIC,
    InternalError: EXIT_NUMERIC,
}


def exit_code_for(exc: BaseException) -> int:
    """Exit code for an exception raised while running a CLI command."""
    if isinstance(exc, OSError):
        return EXIT_IO
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return EXIT_NUMERIC
