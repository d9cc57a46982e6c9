"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation at, or inside the guard band of, a pole."""


class OrderingError(DomainError):
    """Expansion ordering condition violated (inner/outer points swapped)."""


class ConvergenceError(RuntimeError):
    """A series or iteration failed to reach the requested accuracy."""

    def __init__(self, message, attained=None):
        super().__init__(message)
        self.attained = attained


class BracketError(ConvergenceError):
    """Eigenvalue bracket did not isolate a root."""

    def __init__(self, message, lo=None, hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi


class QuadratureWarning(UserWarning):
    """Quadrature resolution looks insufficient for the requested data."""
