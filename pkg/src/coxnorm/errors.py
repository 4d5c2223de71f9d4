"""Exception hierarchy shared across the package.

Two severities matter to callers: input problems (bad files, bad words,
resource caps, a group that is not finite) and computation problems that
signal a genuine bug or a numerically undecidable test.  The CLI maps the
first kind to exit code 1 and the second to exit code 2.
"""


class CoxnormError(Exception):
    """Base class for all package errors."""


class ParseError(CoxnormError):
    """A group file, function file, or word string does not parse."""


class ContextMismatchError(CoxnormError):
    """Operands belong to different group presentations."""


class BallCapExceeded(CoxnormError):
    """Ball enumeration hit the configured element cap."""


class GroupNotFiniteError(CoxnormError):
    """An operation needing a finite group saw the balls keep growing."""


class NumericAmbiguityError(CoxnormError):
    """A floating sign or root-identity test landed inside the tolerance
    band, so the result cannot be certified either way."""


class ConvergenceError(CoxnormError):
    """An iterative solver ran out of iterations; carries the last iterate."""

    def __init__(self, message: str, last_value: float | None = None):
        super().__init__(message)
        self.last_value = last_value


class InvariantViolation(CoxnormError):
    """A mathematical identity the code relies on failed to hold."""
