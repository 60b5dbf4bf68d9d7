"""Dense tensor kernels on the colexicographic (first index fastest) layout.

Tensors are plain numpy arrays. The flattening order used throughout is
colexicographic, which is numpy's Fortran raveling: entry (i_0, ..., i_{M-1})
sits at flat offset sum_m i_m * prod_{l<m} d_l. Matricization along a mode
(or a set of modes) keeps that ordering on both the row and column index.
Mode indices are 0-based everywhere.
"""

import math

import numpy as np

__all__ = [
    "vec",
    "unvec",
    "unfold",
    "fold",
    "unfold_modes",
    "fold_modes",
    "mode_product",
    "contract_all_but",
    "contract_all",
    "inner",
    "frob_norm",
    "cp_compose",
]


def _check_mode(mode, order):
    if not 0 <= mode < order:
        raise ValueError(
            "mode %d out of range for tensor of order %d" % (mode, order)
        )


def _check_modes(modes, order):
    modes = tuple(int(m) for m in modes)
    if len(modes) == 0:
        raise ValueError("mode subset must not be empty")
    if len(set(modes)) != len(modes):
        raise ValueError("duplicate entries in mode subset %r" % (modes,))
    for m in modes:
        _check_mode(m, order)
    return tuple(sorted(modes))


def vec(x):
    """Flatten a tensor to a vector in colexicographic order."""
    return np.asarray(x).ravel(order="F")


def unvec(v, dims):
    """Reshape a colexicographic vector back to a tensor of shape `dims`."""
    v = np.asarray(v)
    dims = tuple(int(d) for d in dims)
    if v.size != math.prod(dims):
        raise ValueError(
            "vector of size %d does not match dims %r" % (v.size, dims)
        )
    return v.reshape(dims, order="F")


def unfold(x, mode):
    """Mode-`mode` matricization.

    Rows are indexed by the chosen mode; columns run over the remaining
    modes colexicographically (lower mode indices fastest).

    Parameters
    ----------
    x : ndarray
        Tensor of any order.
    mode : int
        0-based mode to put on the rows.

    Returns
    -------
    ndarray of shape (d_mode, prod of remaining dims)
    """
    x = np.asarray(x)
    _check_mode(mode, x.ndim)
    return np.moveaxis(x, mode, 0).reshape((x.shape[mode], -1), order="F")


def fold(mat, mode, dims):
    """Inverse of :func:`unfold`: rebuild the tensor of shape `dims`."""
    mat = np.asarray(mat)
    dims = tuple(int(d) for d in dims)
    _check_mode(mode, len(dims))
    rest = dims[:mode] + dims[mode + 1 :]
    if mat.shape != (dims[mode], math.prod(rest)):
        raise ValueError(
            "matrix of shape %r does not fold to dims %r on mode %d"
            % (mat.shape, dims, mode)
        )
    return np.moveaxis(mat.reshape((dims[mode],) + rest, order="F"), 0, mode)


def unfold_modes(x, modes):
    """Matricization along a set of modes.

    Rows run colexicographically over `modes` (sorted ascending), columns
    over the complementary modes. The result does not depend on the order
    in which `modes` is listed.
    """
    x = np.asarray(x)
    rows = _check_modes(modes, x.ndim)
    cols = tuple(m for m in range(x.ndim) if m not in rows)
    d_rows = math.prod(x.shape[m] for m in rows)
    return np.transpose(x, rows + cols).reshape((d_rows, -1), order="F")


def fold_modes(mat, modes, dims):
    """Inverse of :func:`unfold_modes` for a tensor of shape `dims`."""
    mat = np.asarray(mat)
    dims = tuple(int(d) for d in dims)
    rows = _check_modes(modes, len(dims))
    cols = tuple(m for m in range(len(dims)) if m not in rows)
    d_rows = math.prod(dims[m] for m in rows)
    d_cols = math.prod(dims[m] for m in cols)
    if mat.shape != (d_rows, d_cols):
        raise ValueError(
            "matrix of shape %r does not fold to dims %r on modes %r"
            % (mat.shape, dims, rows)
        )
    shape = tuple(dims[m] for m in rows) + tuple(dims[m] for m in cols)
    inverse = np.argsort(rows + cols)
    return np.transpose(mat.reshape(shape, order="F"), inverse)


def mode_product(x, a, mode):
    """Mode-`mode` product: contract `a` (shape (k, d_mode)) with the tensor.

    Computed as the matrix product with the mode unfolding, then refolded,
    so every contraction in the package goes through one tested kernel.
    """
    x = np.asarray(x)
    a = np.asarray(a)
    _check_mode(mode, x.ndim)
    if a.ndim != 2 or a.shape[1] != x.shape[mode]:
        raise ValueError(
            "matrix with %r columns cannot contract mode %d of size %d"
            % (a.shape[1:], mode, x.shape[mode])
        )
    dims = list(x.shape)
    dims[mode] = a.shape[0]
    return fold(a @ unfold(x, mode), mode, dims)


def contract_all_but(x, vectors, keep):
    """Contract every mode except `keep` with the given vectors.

    Parameters
    ----------
    x : ndarray
    vectors : mapping mode -> 1-D array
        Must cover exactly the modes other than `keep`.
    keep : int

    Returns
    -------
    1-D array of length d_keep.
    """
    x = np.asarray(x)
    _check_mode(keep, x.ndim)
    expected = set(range(x.ndim)) - {keep}
    if set(vectors) != expected:
        raise ValueError(
            "vectors cover modes %r, expected modes %r"
            % (sorted(vectors), sorted(expected))
        )
    out = x
    for m in sorted(vectors):
        out = mode_product(out, np.asarray(vectors[m])[None, :], m)
    return out.reshape(x.shape[keep], order="F")


def contract_all(x, vectors):
    """Contract every mode with a vector; returns a float."""
    x = np.asarray(x)
    if len(vectors) != x.ndim:
        raise ValueError(
            "expected %d vectors, got %d" % (x.ndim, len(vectors))
        )
    out = x
    for m in range(x.ndim):
        out = mode_product(out, np.asarray(vectors[m])[None, :], m)
    return float(out.reshape(-1)[0])


def inner(x, y):
    """Frobenius inner product of two same-shape tensors."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError("shape mismatch: %r vs %r" % (x.shape, y.shape))
    return float(np.dot(x.ravel(order="F"), y.ravel(order="F")))


def frob_norm(x):
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(x).ravel(order="F")))


def cp_compose(weights, factors):
    """Assemble a CP tensor sum_r w_r a_{r,0} o ... o a_{r,M-1}.

    Parameters
    ----------
    weights : array-like of shape (R,)
    factors : list of M arrays, each of shape (d_m, R)
        Column r of factor m is the mode-m basis vector of component r.

    Returns
    -------
    ndarray of shape (d_0, ..., d_{M-1})
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1:
        raise ValueError("weights must be a vector")
    r = weights.size
    mats = [np.asarray(f, dtype=float) for f in factors]
    for m, f in enumerate(mats):
        if f.ndim != 2 or f.shape[1] != r:
            raise ValueError(
                "factor %d has shape %r, expected (d_%d, %d)"
                % (m, f.shape, m, r)
            )
    dims = tuple(f.shape[0] for f in mats)
    out = np.zeros(dims)
    for j in range(r):
        term = weights[j] * mats[0][:, j]
        for f in mats[1:]:
            term = np.multiply.outer(term, f[:, j])
        out += term
    return out
