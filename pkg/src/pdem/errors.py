"""Exception types shared across the package."""


class PdemError(Exception):
    """Base class for all package errors."""


class DomainError(PdemError, ValueError):
    """Evaluation requested outside a profile/potential domain of validity."""


class ParameterError(PdemError, ValueError):
    """Invalid construction parameters or call arguments."""


class NumericError(PdemError, RuntimeError):
    """A numerical procedure failed (non-convergence, mass floor, ...)."""
