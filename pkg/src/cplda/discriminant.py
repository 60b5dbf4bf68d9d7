"""Sample estimation of the discriminant tensor and its ingredients.

The mode-m covariance estimate pools within-class-centered matricizations
over both classes and divides by (n1+n2) * d_{-m}. Mode covariances are
identified only up to a common scale, so the last mode is rescaled by the
estimated scale factor C_sigma = prod_m Sigma_m[0,0] / Var(X[0,...,0]),
the variance being pooled within-class with divisor n1+n2. The sample
discriminant is the class-mean gap contracted with every mode precision.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg, tensor
from .exceptions import (
    DegenerateVarianceError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)

# pooled variance of the reference entry below this is not usable for scaling
_VARIANCE_TOL = 1e-14
# relative eigenvalue floor under which a covariance counts as singular
_EIGEN_RTOL = 1e-10
# ridge is this multiple of the mean diagonal entry
_RIDGE_SCALE = 0.01

__all__ = [
    "mode_covariances",
    "safe_precisions",
    "sample_discriminant",
    "DiscriminantEstimate",
]


def _check_classes(x1, x2):
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.ndim < 2 or x2.ndim < 2:
        raise ValueError("class samples must be batches of tensors")
    if x1.shape[1:] != x2.shape[1:]:
        raise ValueError(
            "class sample shape mismatch: %r vs %r"
            % (x1.shape[1:], x2.shape[1:])
        )
    if len(x1) < 2 or len(x2) < 2:
        raise ValueError("each class needs at least two samples")
    return x1, x2


def mode_covariances(x1, x2):
    """Per-mode covariance estimates and the scale factor C_sigma.

    Returns
    -------
    covs : list of ndarray
        Mode covariance estimates; the last mode already divided by C_sigma.
    c_sigma : float
    """
    x1, x2 = _check_classes(x1, x2)
    n = len(x1) + len(x2)
    dev = np.concatenate([x1 - x1.mean(axis=0), x2 - x2.mean(axis=0)])
    dims = dev.shape[1:]
    total = int(np.prod(dims))
    covs = []
    for m, d_m in enumerate(dims):
        u = tensor.unfold(dev, m + 1)  # samples fold into the columns
        g = u @ u.T / (n * (total // d_m))
        covs.append((g + g.T) / 2.0)
    first = dev[(slice(None),) + (0,) * len(dims)]
    pooled = float(np.mean(first**2))
    if pooled <= _VARIANCE_TOL:
        raise DegenerateVarianceError(
            "pooled variance of the reference entry is %g" % pooled
        )
    c_sigma = float(np.prod([c[0, 0] for c in covs]) / pooled)
    covs[-1] = covs[-1] / c_sigma
    return covs, c_sigma


def safe_precisions(covs, n1, n2, ridge=None):
    """Invert mode covariances, ridging the ill-posed ones.

    A mode is inverted directly when min(n1, n2) > d_m / d_{-m} and the
    estimate is numerically nonsingular; otherwise gamma_m * I is added
    first, with gamma_m = max(ridge, 0.01 * mean diagonal).

    Returns
    -------
    precisions : list of ndarray
    gammas : tuple of float
        The ridge actually applied per mode (0.0 where none).
    """
    covs = [np.asarray(c, dtype=float) for c in covs]
    total = int(np.prod([c.shape[0] for c in covs]))
    nmin = min(int(n1), int(n2))
    precisions = []
    gammas = []
    for m, cov in enumerate(covs):
        d_m = cov.shape[0]
        evals = np.linalg.eigvalsh(cov)
        well_posed = nmin > d_m / (total // d_m) and evals[0] > _EIGEN_RTOL * max(
            evals[-1], 0.0
        )
        if well_posed:
            precisions.append(linalg.sym_inverse(cov))
            gammas.append(0.0)
            continue
        gamma = max(
            ridge if ridge is not None else 0.0,
            _RIDGE_SCALE * float(np.trace(cov)) / d_m,
        )
        try:
            precisions.append(linalg.sym_inverse(cov + gamma * np.eye(d_m)))
        except NotPositiveDefiniteError as exc:
            raise SingularMatrixError(
                "mode %d covariance is singular even after ridge %g"
                % (m, gamma)
            ) from exc
        gammas.append(gamma)
    return precisions, tuple(gammas)


@dataclass
class DiscriminantEstimate:
    """Sample discriminant tensor with the pieces it was built from."""

    b_hat: np.ndarray
    mean1: np.ndarray
    mean2: np.ndarray
    precisions: list
    prior1: float
    prior2: float
    c_sigma: float
    ridge: tuple

    @property
    def dims(self):
        return self.b_hat.shape


def sample_discriminant(x1, x2, ridge=None):
    """Estimate the discriminant tensor from per-class sample batches."""
    x1, x2 = _check_classes(x1, x2)
    covs, c_sigma = mode_covariances(x1, x2)
    precisions, gammas = safe_precisions(covs, len(x1), len(x2), ridge=ridge)
    mean1 = x1.mean(axis=0)
    mean2 = x2.mean(axis=0)
    b = mean2 - mean1
    for m, prec in enumerate(precisions):
        b = tensor.mode_product(b, prec, m)
    n = len(x1) + len(x2)
    return DiscriminantEstimate(
        b_hat=b,
        mean1=mean1,
        mean2=mean2,
        precisions=precisions,
        prior1=len(x1) / n,
        prior2=len(x2) / n,
        c_sigma=c_sigma,
        ridge=gammas,
    )
