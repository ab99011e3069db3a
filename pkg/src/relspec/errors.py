"""Exception types shared across the package."""
from __future__ import annotations


class ParameterError(ValueError):
    """An algorithm parameter is outside its admissible range."""


class KernelHit(RuntimeError):
    """A power chain ran into the operator's kernel.

    Raised internally when an iterate's image has norm below the kernel
    threshold; sampling routines catch it and return a zero sample, since a
    direction in the kernel contributes nothing to the estimated quantity.
    """


class IllConditionedError(RuntimeError):
    """A linear solve produced a residual too large to trust."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class NumericalFailure(RuntimeError):
    """An iterative routine lost numerical validity (non-finite iterate)."""

    def __init__(self, message: str, iteration: int = -1):
        super().__init__(message)
        self.iteration = iteration
