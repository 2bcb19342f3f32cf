"""Exception and warning types shared across the package."""


class PsifracError(Exception):
    """Base class for all psifrac errors."""


class DomainError(PsifracError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ValidationError(PsifracError, ValueError):
    """Inputs violate a structural precondition (grids, kernels, bounds)."""


class NonconvergenceError(PsifracError, RuntimeError):
    """An iteration hit its budget before reaching the requested tolerance.

    When raised by the Picard solver, ``result`` carries the partial solve.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ContractionWarning(RuntimeWarning):
    """Observed residual decay ratio exceeded the theoretical contraction factor."""
