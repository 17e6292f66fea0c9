"""Exception types raised by the library."""


class SwapFMMError(Exception):
    """Base class for all library errors."""


class SingularPointError(SwapFMMError, ValueError):
    """A singular harmonic or kernel was evaluated at its singularity."""


class ZeroShiftError(SwapFMMError, ValueError):
    """A translation was requested with a zero shift vector."""


class OrderTooLargeError(SwapFMMError, ValueError):
    """The requested order overflows the faculty table of the chosen precision."""


class WorkspaceMismatchError(SwapFMMError, ValueError):
    """A workspace does not fit the operator data or batch it is used with."""


class SolidFormatError(SwapFMMError, ValueError):
    """A text file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
