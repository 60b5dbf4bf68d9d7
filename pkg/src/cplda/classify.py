"""Plug-in discriminant rule and evaluation metrics.

The rule assigns class 2 exactly when <z - midpoint, b> plus the log
prior ratio is nonnegative (ties go to class 2). Basis recovery error is
sign- and permutation-invariant: components are matched greedily on mean
absolute inner product, and the reported error is the worst projector
distance across matched columns and modes.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import tensor

__all__ = [
    "CpLdaRule",
    "rule_from_estimate",
    "decision_values",
    "predict",
    "misclassification_rate",
    "basis_error",
    "rel_tensor_error",
]


@dataclass
class CpLdaRule:
    """Linear rule parameters: discriminant tensor, midpoint, prior offset."""

    b: np.ndarray
    midpoint: np.ndarray
    log_prior_ratio: float = 0.0

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        self.midpoint = np.asarray(self.midpoint, dtype=float)
        if self.b.shape != self.midpoint.shape:
            raise ValueError(
                "shape mismatch: b %r vs midpoint %r"
                % (self.b.shape, self.midpoint.shape)
            )
        self.log_prior_ratio = float(self.log_prior_ratio)
        if not math.isfinite(self.log_prior_ratio):
            raise ValueError("log prior ratio must be finite")

    @property
    def dims(self):
        return self.b.shape


def rule_from_estimate(estimate, model=None):
    """Build the rule from a discriminant estimate.

    With `model` given, the low-rank composition replaces the raw estimate
    as the discriminant tensor.
    """
    b = model.compose() if model is not None else estimate.b_hat
    return CpLdaRule(
        b=b,
        midpoint=(estimate.mean1 + estimate.mean2) / 2.0,
        log_prior_ratio=math.log(estimate.prior2 / estimate.prior1),
    )


def _check_input(rule, x):
    x = np.asarray(x, dtype=float)
    if x.shape == rule.dims:
        return x[None], True
    if x.shape[1:] == rule.dims and x.ndim == len(rule.dims) + 1:
        return x, False
    raise ValueError(
        "input shape %r does not match rule dims %r" % (x.shape, rule.dims)
    )


def decision_values(rule, x):
    """Statistic <z - midpoint, b> + log prior ratio; batch or single."""
    batch, single = _check_input(rule, x)
    flat = tensor.unfold(batch, 0)
    stats = flat @ tensor.vec(rule.b)
    stats += rule.log_prior_ratio - tensor.inner(rule.midpoint, rule.b)
    return float(stats[0]) if single else stats


def predict(rule, x):
    """Class labels in {1, 2}; the statistic's ties go to class 2."""
    stats = decision_values(rule, x)
    if np.isscalar(stats):
        return 2 if stats >= 0.0 else 1
    return np.where(stats >= 0.0, 2, 1)


def misclassification_rate(rule, x1, x2):
    """Fraction of errors over both per-class sample batches."""
    wrong = int(np.sum(predict(rule, x1) == 2))
    wrong += int(np.sum(predict(rule, x2) == 1))
    return wrong / (len(x1) + len(x2))


def basis_error(factors, true_factors):
    """Worst sign-invariant column error after greedy component matching."""
    rank = true_factors[0].shape[1]
    if factors[0].shape[1] != rank:
        raise ValueError("component count mismatch")
    scores = np.zeros((rank, rank))
    for f, ft in zip(factors, true_factors):
        scores += np.abs(f.T @ ft)
    scores /= len(true_factors)
    available = scores.copy()
    worst = 0.0
    for _ in range(rank):
        j, jt = np.unravel_index(np.argmax(available), available.shape)
        available[j, :] = -np.inf
        available[:, jt] = -np.inf
        for f, ft in zip(factors, true_factors):
            c = min(abs(float(f[:, j] @ ft[:, jt])), 1.0)
            worst = max(worst, math.sqrt(1.0 - c * c))
    return worst


def rel_tensor_error(b_est, b_true):
    """Frobenius error relative to the reference tensor."""
    denom = tensor.frob_norm(b_true)
    if denom <= 0.0:
        raise ValueError("reference tensor has zero norm")
    return tensor.frob_norm(np.asarray(b_est) - np.asarray(b_true)) / denom
