class PPCurveError(Exception):
    """Base class for every error raised by ppcurve."""


class DomainError(PPCurveError, ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidStateError(PPCurveError, RuntimeError):
    """The operation is not defined for the current state of the object."""


class NumericError(PPCurveError, ArithmeticError):
    """A numerical routine failed (factorisation, non-finite values)."""


class DataError(PPCurveError, ValueError):
    """Input data is malformed or degenerate."""

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None) -> None:
        self.source = source
        self.line = line

        location = ""
        if source is not None:
            location = f"{source}:{line}: " if line is not None else f"{source}: "

        super().__init__(f"{location}{message}")
