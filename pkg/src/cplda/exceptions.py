"""Exception types raised by the estimation pipeline."""

import numpy as np


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix required to be invertible is numerically singular."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Cholesky failure; `pivot` is the 0-based index of the bad pivot."""

    def __init__(self, pivot, message=None):
        self.pivot = int(pivot)
        super().__init__(
            message or "matrix is not positive definite (pivot %d)" % pivot
        )


class DegenerateVarianceError(ArithmeticError):
    """Pooled variance of the reference entry is too small to normalize by."""


class DegenerateComponentError(ArithmeticError):
    """A component collapsed during iteration; names (component, mode)."""

    def __init__(self, component, mode, iteration, message=None):
        self.component = int(component)
        self.mode = int(mode)
        self.iteration = int(iteration)
        super().__init__(
            message
            or "component %d collapsed on mode %d at iteration %d"
            % (component, mode, iteration)
        )


class ProjectionPoolError(RuntimeError):
    """Randomized projection pool exhausted before enough components."""
