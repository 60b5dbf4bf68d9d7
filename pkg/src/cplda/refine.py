"""Iterative projection refinement of CP components.

Each sweep updates one mode at a time: component r's new mode-m vector is
the tensor contracted with the right-inverse columns of every other mode,
normalized. Within a sweep, modes already visited contribute their fresh
right inverses and the others their previous ones; a mode's right inverse
is recomputed once, after its component loop. Iteration stops when the
largest projector distance between successive basis vectors drops to the
tolerance, or at the sweep cap.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, tensor
from .exceptions import DegenerateComponentError, SingularMatrixError

# default projector-distance tolerance and sweep cap
_TOL = 1e-6
_MAX_ITER = 50
# contraction norms below this mean a component has collapsed
_NORM_TOL = 1e-14
# allowed deviation of factor columns from unit norm
_UNIT_TOL = 1e-8

__all__ = ["CpModel", "FitReport", "basis_change", "refine_cp"]


@dataclass
class CpModel:
    """CP representation: positive nonincreasing weights, unit factor columns."""

    weights: np.ndarray
    factors: list

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.factors = [np.asarray(f, dtype=float) for f in self.factors]
        if self.weights.ndim != 1:
            raise ValueError("weights must be a vector")
        if np.any(self.weights < 0.0):
            raise ValueError("weights must not be negative")
        if np.any(np.diff(self.weights) > 0.0):
            raise ValueError("weights must be nonincreasing")
        r = self.weights.size
        for m, f in enumerate(self.factors):
            if f.ndim != 2 or f.shape[1] != r:
                raise ValueError(
                    "factor %d has shape %r, expected (d_%d, %d)"
                    % (m, f.shape, m, r)
                )
            norms = np.linalg.norm(f, axis=0)
            if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
                raise ValueError(
                    "factor %d columns must be unit norm (got %r)" % (m, norms)
                )

    @property
    def rank(self):
        return int(self.weights.size)

    @property
    def dims(self):
        return tuple(f.shape[0] for f in self.factors)

    def compose(self):
        """The tensor this model represents."""
        return tensor.cp_compose(self.weights, self.factors)


@dataclass
class FitReport:
    """Refinement trace: per-iteration change and factor conditioning."""

    model: CpModel
    iterations: int
    converged: bool
    basis_changes: list
    min_singular_values: list


def basis_change(prev_factors, next_factors):
    """Largest projector distance sqrt(1 - <u, v>^2) over all columns."""
    worst = 0.0
    for f, g in zip(prev_factors, next_factors):
        dots = np.clip(np.abs(np.sum(f * g, axis=0)), 0.0, 1.0)
        worst = max(worst, float(np.max(np.sqrt(1.0 - dots**2))))
    return worst


def refine_cp(b_hat, warm, tol=_TOL, max_iter=_MAX_ITER):
    """Refine warm-start factors against the discriminant estimate.

    Parameters
    ----------
    b_hat : ndarray
        Target tensor.
    warm : WarmStart or any object with unit-column `factors`.
    tol : float
        Stop when the sweep's largest projector distance is at most this.
    max_iter : int
        Sweep cap.

    Returns
    -------
    FitReport
        With the final CpModel: weights are |full contractions| sorted
        nonincreasing (mode-0 columns sign-flipped where the contraction
        was negative, so the composition approximates `b_hat`).
    """
    b_hat = np.asarray(b_hat, dtype=float)
    order = b_hat.ndim
    factors = [np.array(f, dtype=float) for f in warm.factors]
    rank = factors[0].shape[1]

    def inverses(mode, iteration):
        try:
            return linalg.right_inverse(factors[mode])
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                "mode %d factors are rank deficient at iteration %d"
                % (mode, iteration)
            ) from exc

    b_mats = [inverses(m, 0) for m in range(order)]
    changes = []
    min_svs = []
    converged = False
    iterations = 0
    for t in range(1, int(max_iter) + 1):
        iterations = t
        prev = [f.copy() for f in factors]
        min_sv = math.inf
        for m in range(order):
            for r in range(rank):
                vectors = {l: b_mats[l][:, r] for l in range(order) if l != m}
                z = tensor.contract_all_but(b_hat, vectors, m)
                norm = np.linalg.norm(z)
                if norm < _NORM_TOL:
                    raise DegenerateComponentError(r, m, t)
                factors[m][:, r] = z / norm
            b_mats[m] = inverses(m, t)
            min_sv = min(min_sv, float(np.linalg.svd(factors[m], compute_uv=False)[-1]))
        changes.append(basis_change(prev, factors))
        min_svs.append(min_sv)
        if changes[-1] <= tol:
            converged = True
            break

    raw = np.array(
        [
            tensor.contract_all(b_hat, [b_mats[m][:, r] for m in range(order)])
            for r in range(rank)
        ]
    )
    for r in np.nonzero(raw < 0.0)[0]:
        factors[0][:, r] = -factors[0][:, r]
    weights = np.abs(raw)
    order_idx = np.argsort(-weights, kind="stable")
    model = CpModel(
        weights=weights[order_idx],
        factors=[f[:, order_idx] for f in factors],
    )
    return FitReport(
        model=model,
        iterations=iterations,
        converged=converged,
        basis_changes=changes,
        min_singular_values=min_svs,
    )
