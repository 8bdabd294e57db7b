"""Exception hierarchy.

The CLI maps these to exit codes: input/config problems -> 2,
degenerate data -> 3, insufficient data -> 4.
"""


class MacroClusterError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(MacroClusterError, ValueError):
    """Malformed input file or invalid configuration."""

    exit_code = 2


class ParseError(InputError):
    """A panel or matrix file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateDataError(MacroClusterError, ValueError):
    """Zero-variance series or distance sets where a ratio is undefined."""

    exit_code = 3


class InsufficientDataError(MacroClusterError, ValueError):
    """Too few years, windows or points for the requested computation."""

    exit_code = 4
