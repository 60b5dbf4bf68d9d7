"""Dense linear algebra with deterministic sign conventions.

Factorizations are delegated to LAPACK (via numpy/scipy) except for the
Cholesky factor, which is computed column by column so that failures can
report the offending pivot. Singular vectors are sign-fixed so repeated
calls on equal inputs are bitwise identical.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import NotPositiveDefiniteError, SingularMatrixError

# relative eigenvalue threshold below which a Gram matrix counts as singular
_SINGULAR_RTOL = 1e-12
# allowed relative asymmetry in inputs declared symmetric
_SYMMETRY_RTOL = 1e-8

__all__ = [
    "canonical_sign",
    "top_k_svd",
    "right_inverse",
    "chol_factor",
    "sym_inverse",
]


def canonical_sign(v):
    """Flip `v` so its largest-magnitude entry is nonnegative.

    Ties go to the lowest index. A zero vector is returned unchanged.
    """
    v = np.asarray(v)
    peak = v[np.argmax(np.abs(v))]
    return -v if peak < 0.0 else v


def _check_symmetric(s, name):
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("%s must be square, got shape %r" % (name, s.shape))
    scale = max(1.0, float(np.max(np.abs(s))))
    if np.max(np.abs(s - s.T)) > _SYMMETRY_RTOL * scale:
        raise ValueError("%s must be symmetric" % name)
    return (s + s.T) / 2.0


def top_k_svd(a, k):
    """Leading `k` singular triples of a matrix.

    Parameters
    ----------
    a : ndarray of shape (m, n)
    k : int, 1 <= k <= min(m, n)

    Returns
    -------
    u : ndarray of shape (m, k)
    s : ndarray of shape (k,), nonincreasing
    v : ndarray of shape (n, k)
        Right singular vectors as columns, signs matched to `u`.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix, got shape %r" % (a.shape,))
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    if not 1 <= k <= min(a.shape):
        raise ValueError(
            "k=%d out of range for shape %r" % (k, a.shape)
        )
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    u = u[:, :k].copy()
    v = vt[:k].T.copy()
    for i in range(k):
        if u[np.argmax(np.abs(u[:, i])), i] < 0.0:
            u[:, i] = -u[:, i]
            v[:, i] = -v[:, i]
    return u, s[:k].copy(), v


def right_inverse(a):
    """Right inverse B = A (A^T A)^{-1}, so that B^T A = I.

    Raises
    ------
    SingularMatrixError
        If the Gram matrix A^T A is numerically rank deficient.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix, got shape %r" % (a.shape,))
    g = a.T @ a
    evals = np.linalg.eigvalsh(g)
    if evals[-1] <= 0.0 or evals[0] <= _SINGULAR_RTOL * evals[-1]:
        raise SingularMatrixError(
            "columns are numerically dependent (eigenvalue range %g..%g)"
            % (evals[0], evals[-1])
        )
    return np.linalg.solve(g, a.T).T


def chol_factor(s):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises
    ------
    NotPositiveDefiniteError
        Carrying the 0-based pivot index at which positivity fails.
    """
    s = _check_symmetric(s, "matrix")
    n = s.shape[0]
    l = np.zeros_like(s)
    for j in range(n):
        d = s[j, j] - l[j, :j] @ l[j, :j]
        if not np.isfinite(d) or d <= 0.0:
            raise NotPositiveDefiniteError(pivot=j)
        l[j, j] = np.sqrt(d)
        if j + 1 < n:
            l[j + 1 :, j] = (s[j + 1 :, j] - l[j + 1 :, :j] @ l[j, :j]) / l[j, j]
    return l


def sym_inverse(s):
    """Inverse of a symmetric positive definite matrix, symmetrized."""
    l = chol_factor(s)
    linv = solve_triangular(l, np.eye(l.shape[0]), lower=True)
    inv = linv.T @ linv
    return (inv + inv.T) / 2.0
