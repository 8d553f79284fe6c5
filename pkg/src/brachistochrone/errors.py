"""Exception types shared across the package."""


class BrachistochroneError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(BrachistochroneError, ValueError):
    """A precondition on an argument was violated."""


class DomainError(ArgumentError):
    """A Lagrangian was evaluated outside its open domain."""


class CurveFormatError(ArgumentError):
    """A curve file is malformed or its samples are not admissible.

    ``row`` is the zero-based data row (header excluded) that failed, or
    ``None`` when the problem is not tied to a single row.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class QuadratureError(BrachistochroneError, ArithmeticError):
    """Refinement of an improper integral did not settle.

    The two most recent estimates are kept so the caller can judge whether
    the integral diverges or the tolerance is merely too tight.
    """

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


class InvariantViolation(BrachistochroneError, RuntimeError):
    """An internal consistency check failed (indicates a bug)."""
