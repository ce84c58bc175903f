"""Exception hierarchy.

Domain errors carry the violated constraint spelled out as an inequality so
the CLI can surface it verbatim (exit code 1). Usage problems (bad arguments,
unreadable config) are raised as UsageError (exit code 2).
"""


class FraclapError(Exception):
    """Base class for all library errors."""


class DomainError(FraclapError):
    """A mathematical precondition is violated; message quotes the inequality."""


class GridResolutionError(DomainError):
    """Grid cannot resolve the requested object (kernel tails, bump coronas)."""


class NonConvergenceError(FraclapError):
    """Fixed-point iteration hit max_iter without converging or overflowing."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = list(residuals)


class UsageError(FraclapError):
    """Malformed invocation: unknown subcommand, unreadable or invalid config."""
