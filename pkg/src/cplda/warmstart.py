"""Warm-start CP component estimates from the sample discriminant.

The tensor is matricized along a balanced mode split and its leading
singular triples are computed. Components whose singular values are well
separated (eigengap test) are extracted one at a time by per-mode rank-one
compression of the singular vectors. Runs of components with nearly tied
singular values are handled together: their part of the spectrum is
refolded to a tensor and random mode-0 projections split the tie, with a
greedy overlap-pruned selection keeping one tuple per component.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, sampling, tensor
from .exceptions import ProjectionPoolError

# contraction norms below this mark a degenerate candidate tuple
_NORM_TOL = 1e-14

__all__ = [
    "InitConfig",
    "WarmStart",
    "choose_split",
    "eigengap_groups",
    "extract_mode_vectors",
    "randomized_projection",
    "rc_pca",
]


@dataclass
class InitConfig:
    """Knobs for the warm start.

    n_projections defaults to max(100, 2 * d_0) at call time; the theory
    asks for order d_0^2 draws, which is far more than these problems need.
    """

    rank: int
    split: tuple = None
    eigengap_c0: float = 0.1
    n_projections: int = None
    overlap: float = 0.5

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be at least 1, got %d" % self.rank)
        if self.eigengap_c0 < 0.0:
            raise ValueError("eigengap_c0 must be nonnegative")
        if not 0.0 < self.overlap <= 1.0:
            raise ValueError("overlap must lie in (0, 1]")
        if self.n_projections is not None and self.n_projections < 1:
            raise ValueError("n_projections must be positive")


@dataclass
class WarmStart:
    """Initial unit-norm factor columns plus how they were obtained."""

    factors: list
    singular_values: np.ndarray
    split: tuple
    groups: list
    branches: list


def choose_split(dims, requested=None):
    """Mode subset S maximizing min(d_S, d / d_S).

    Ties go to the lexicographically smallest subset. `requested`, if
    given, is validated and returned sorted instead.
    """
    dims = tuple(int(d) for d in dims)
    order = len(dims)
    if order < 2:
        raise ValueError("need a tensor of order at least 2, got %d" % order)
    if requested is not None:
        req = tuple(sorted(int(m) for m in requested))
        if not req or len(set(req)) != len(req):
            raise ValueError("split must be a nonempty set of distinct modes")
        if any(not 0 <= m < order for m in req) or len(req) == order:
            raise ValueError(
                "split %r is not a proper subset of the %d modes" % (req, order)
            )
        return req
    total = math.prod(dims)
    best = None
    best_val = -1
    for size in range(1, order):
        for s in itertools.combinations(range(order), size):
            d_s = math.prod(dims[m] for m in s)
            val = min(d_s, total // d_s)
            if val > best_val or (val == best_val and s < best):
                best, best_val = s, val
    return best


def eigengap_groups(singular_values, c0):
    """Group component indices by the eigengap test.

    Index r passes when both neighboring gaps exceed c0 times the smallest
    retained singular value (with sentinels +inf above and 0 below).
    Passing indices form singleton groups; consecutive failing indices
    merge into maximal runs.
    """
    lams = [float(v) for v in singular_values]
    r = len(lams)
    if r == 0:
        raise ValueError("need at least one singular value")
    tau = c0 * lams[-1]
    padded = [math.inf] + lams + [0.0]
    passes = [
        min(abs(padded[i] - padded[i - 1]), abs(padded[i] - padded[i + 1])) > tau
        for i in range(1, r + 1)
    ]
    groups = []
    i = 0
    while i < r:
        if passes[i]:
            groups.append([i])
            i += 1
            continue
        j = i
        while j < r and not passes[j]:
            j += 1
        groups.append(list(range(i, j)))
        i = j
    return groups


def extract_mode_vectors(u, modes, dims):
    """Per-mode unit vectors from one side of a singular vector.

    `u` has length prod(d_m for m in modes) and is read as a subtensor
    over `modes` (sorted) in colexicographic layout; each mode's vector is
    the top left singular vector of the corresponding unfolding.

    Returns
    -------
    dict mode -> 1-D unit ndarray (sign canonicalized)
    """
    modes = tuple(sorted(int(m) for m in modes))
    sub = tensor.unvec(u, [dims[m] for m in modes])
    out = {}
    for pos, m in enumerate(modes):
        mat = tensor.unfold(sub, pos)
        left, _, _ = linalg.top_k_svd(mat, 1)
        out[m] = left[:, 0]
    return out


def randomized_projection(xi, s, n_projections, overlap, rng):
    """Split a group of `s` nearly tied components by random projections.

    Each draw contracts mode 0 with a standard normal vector, takes the
    leading singular pair of a balanced unfolding of the result, reads off
    per-mode vectors, and recovers the mode-0 vector by contracting the
    other modes back into `xi`. A greedy pass keeps the `s` tuples with the
    largest |full contraction|, pruning every tuple whose per-mode overlap
    with a selected one exceeds `overlap`.

    Returns
    -------
    list of `s` lists of per-mode unit vectors, selection order.

    Raises
    ------
    ProjectionPoolError
        If pruning empties the pool before `s` tuples are selected.
    """
    xi = np.asarray(xi, dtype=float)
    order = xi.ndim
    if order < 2:
        raise ValueError("need a tensor of order at least 2")
    dims = xi.shape
    rest = dims[1:]
    if len(rest) == 1:
        inner_split = (0,)
    else:
        inner_split = choose_split(rest)
    inner_rest = tuple(m for m in range(len(rest)) if m not in inner_split)
    pool = []
    for idx in range(int(n_projections)):
        theta = sampling.standard_normals(rng, dims[0])
        y = tensor.mode_product(xi, theta[None, :], 0)[0]
        mat = tensor.unfold_modes(y, inner_split)
        left, _, right = linalg.top_k_svd(mat, 1)
        vectors = extract_mode_vectors(left[:, 0], inner_split, rest)
        if inner_rest:
            vectors.update(extract_mode_vectors(right[:, 0], inner_rest, rest))
        by_mode = {m + 1: v for m, v in vectors.items()}
        head = tensor.contract_all_but(xi, by_mode, 0)
        nrm = np.linalg.norm(head)
        if nrm < _NORM_TOL:
            continue
        tup = [linalg.canonical_sign(head / nrm)]
        tup += [by_mode[m] for m in range(1, order)]
        score = abs(tensor.contract_all(xi, tup))
        pool.append((score, idx, tup))
    selected = []
    while len(selected) < s:
        if not pool:
            raise ProjectionPoolError(
                "projection pool exhausted after %d of %d components; "
                "increase n_projections or raise the overlap threshold"
                % (len(selected), s)
            )
        score, idx, best = max(pool, key=lambda t: (t[0], -t[1]))
        selected.append(best)
        pool = [
            t
            for t in pool
            if max(abs(t[2][m] @ best[m]) for m in range(order)) <= overlap
        ]
    return selected


def rc_pca(b_hat, config, rng):
    """Warm-start factor matrices for a rank-R CP fit of `b_hat`."""
    b_hat = np.asarray(b_hat, dtype=float)
    dims = b_hat.shape
    split = choose_split(dims, config.split)
    mat = tensor.unfold_modes(b_hat, split)
    rank = int(config.rank)
    if rank > min(mat.shape):
        raise ValueError(
            "rank %d exceeds the %r unfolding of dims %r"
            % (rank, mat.shape, dims)
        )
    left, lams, right = linalg.top_k_svd(mat, rank)
    groups = eigengap_groups(lams, config.eigengap_c0)
    n_proj = config.n_projections
    if n_proj is None:
        n_proj = max(100, 2 * dims[0])
    complement = tuple(m for m in range(b_hat.ndim) if m not in split)
    factors = [np.zeros((d, rank)) for d in dims]
    branches = []
    for group in groups:
        if len(group) == 1:
            r = group[0]
            vectors = extract_mode_vectors(left[:, r], split, dims)
            vectors.update(extract_mode_vectors(right[:, r], complement, dims))
            for m, v in vectors.items():
                factors[m][:, r] = v
            branches.append("cpca")
            continue
        xi_mat = (left[:, group] * lams[group]) @ right[:, group].T
        xi = tensor.fold_modes(xi_mat, split, dims)
        tuples = randomized_projection(
            xi, len(group), n_proj, config.overlap, rng
        )
        for r, tup in zip(group, tuples):
            for m in range(b_hat.ndim):
                factors[m][:, r] = tup[m]
        branches.append("randomized")
    return WarmStart(
        factors=factors,
        singular_values=lams,
        split=split,
        groups=groups,
        branches=branches,
    )
