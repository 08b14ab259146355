"""Exception types shared across the package."""


class HomsearchError(Exception):
    """Base class for all package-specific errors."""


class ZeroSystemError(HomsearchError, ValueError):
    """Raised when an operation requires a nonzero polynomial or system."""


class DegeneratePairError(HomsearchError, ValueError):
    """Raised when two systems are (anti)parallel and span no geodesic."""


class SingularSystemError(HomsearchError, ArithmeticError):
    """Raised when the Jacobian stacked with the point row is numerically singular."""


class RootCountError(HomsearchError, RuntimeError):
    """Raised when a solver returns fewer distinct roots than the Bezout count."""


class SystemFormatError(HomsearchError, ValueError):
    """Raised on malformed system or report files; carries line diagnostics."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
