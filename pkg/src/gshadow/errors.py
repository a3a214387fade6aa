"""Exception types shared across the package."""


class GShadowError(Exception):
    """Base class for all package errors."""


class InputError(GShadowError, ValueError):
    """Invalid arguments: unknown symbols, dimension mismatch, singular scales."""


class ResourceBudgetError(GShadowError, RuntimeError):
    """A search or enumeration exceeded its configured node budget."""


class SolverError(GShadowError, RuntimeError):
    """A shadowing solver could not produce a result for the given inputs."""


class NumericError(GShadowError, RuntimeError):
    """An iterative numeric routine failed to converge.

    Carries the last residual so callers can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
