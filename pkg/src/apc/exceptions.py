"""Exception hierarchy shared by the library and the command line."""


class APCError(Exception):
    """Base class for every error raised by this package."""


class AssumptionViolation(APCError, ValueError):
    """Cost parameters do not satisfy ``0 < c_pc < c_hc``."""


class DataError(APCError, ValueError):
    """Malformed or inconsistent input data."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CursorError(DataError):
    """A cursor sentinel appeared where only concrete text is allowed."""
