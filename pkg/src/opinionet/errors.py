"""Exception types shared across the package."""


class OpinionetError(Exception):
    """Base class for all package errors."""


class GraphBuildError(OpinionetError, ValueError):
    """Raised when edge records cannot form a valid signed digraph."""


class ParseError(OpinionetError, ValueError):
    """Raised when an edge-list stream is unreadable or fully malformed."""


class ConfigError(OpinionetError, ValueError):
    """Raised for invalid experiment or CLI configuration."""


class ConvergenceError(OpinionetError, RuntimeError):
    """Raised when an iterative solver exhausts its iteration budget.

    Carries the last residual and the iteration count so callers can
    report how far the solve got.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
