"""Exception types raised by bdsiw."""


class BdsiwError(Exception):
    """Base class for package errors."""


class UndefinedHazardError(BdsiwError, ArithmeticError):
    """A hazard was requested at a point with zero reliability."""


class NonConvergenceError(BdsiwError):
    """No optimizer start converged; ``best`` holds the best point found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DataError(BdsiwError, ValueError):
    """Malformed input data (bad CSV cell, empty file, negative count...)."""
