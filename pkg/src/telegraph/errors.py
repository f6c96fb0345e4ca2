"""Exception hierarchy shared by every module of the package."""


class TelegraphError(Exception):
    """Base class for all package errors."""


class DomainError(TelegraphError, ValueError):
    """A function was evaluated outside its real domain or produced a non-finite value."""

    def __init__(self, message, where=None):
        super().__init__(message if where is None else f"{message} (at {where})")
        self.where = where


class NonPositiveSpeed(TelegraphError, ValueError):
    pass


class ArityMismatch(TelegraphError, ValueError):
    pass


class ParseError(TelegraphError, ValueError):
    """Malformed expression source; ``position`` is a 0-based character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class MaxDepthExceeded(TelegraphError, ArithmeticError):
    """Adaptive quadrature hit its depth limit before reaching the tolerance.

    ``estimate`` holds the best available value of the integral.
    """

    def __init__(self, estimate, error_estimate):
        super().__init__(
            f"max subdivision depth reached; estimate={estimate!r}, "
            f"error estimate={error_estimate!r}"
        )
        self.estimate = estimate
        self.error_estimate = error_estimate


class AlphaOutOfRange(TelegraphError, ValueError):
    pass


class CflViolation(TelegraphError, ValueError):
    def __init__(self, nu):
        super().__init__(f"CFL condition violated: nu = a*dt/dx = {nu:.6g} > 1")
        self.nu = nu
