"""Tensor-normal sampling, the two-class mixture model, and its Bayes risk.

A tensor-normal draw is X = M + Z x_0 L_0 ... x_{M-1} L_{M-1} with Z an
i.i.d. standard normal tensor and L_m the Cholesky factor of the mode-m
covariance, so vec(X) is Gaussian with covariance Sigma_{M-1} (x) ... (x)
Sigma_0 over the colexicographic vectorization.

Randomness comes from a counter-based 64-bit generator (Philox) and normal
draws use Box-Muller on its uniform output, so streams are portable and
replayable. Replication substreams are derived by XOR-ing the base seed
with the replication index times a large odd constant.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, tensor

_SUBSTREAM_STRIDE = 0x9E3779B97F4A7C15  # odd, 2^64 / golden ratio
_PRIOR_TOL = 1e-12
# tolerated negative inner product, relative, before snr raises
_SNR_TOL = 1e-6

__all__ = [
    "make_rng",
    "substream_seed",
    "standard_normals",
    "TgmmParams",
    "fisher_discriminant",
    "fisher_snr",
    "normal_cdf",
    "bayes_error",
    "sample_tensor_normal",
    "sample_tgmm",
]


def make_rng(seed):
    """Generator over a Philox counter-based bit stream."""
    return np.random.Generator(np.random.Philox(key=int(seed) % 2**64))


def substream_seed(seed, index):
    """Derived seed for replication `index`: seed XOR index*stride mod 2^64."""
    return (int(seed) ^ ((int(index) * _SUBSTREAM_STRIDE) % 2**64)) % 2**64


def standard_normals(rng, shape):
    """Standard normal draws via Box-Muller on `rng`'s uniforms."""
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    n = math.prod(shape) if shape else 1
    half = (n + 1) // 2
    u1 = 1.0 - rng.random(half)  # in (0, 1], keeps the log finite
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * half)
    z[:half] = radius * np.cos(angle)
    z[half:] = radius * np.sin(angle)
    return z[:n].reshape(shape)


@dataclass
class TgmmParams:
    """Two-class tensor Gaussian mixture with shared mode covariances."""

    mean1: np.ndarray
    mean2: np.ndarray
    covs: list = field(default_factory=list)
    prior1: float = 0.5
    prior2: float = 0.5

    def __post_init__(self):
        self.mean1 = np.asarray(self.mean1, dtype=float)
        self.mean2 = np.asarray(self.mean2, dtype=float)
        if self.mean1.shape != self.mean2.shape:
            raise ValueError(
                "mean shape mismatch: %r vs %r"
                % (self.mean1.shape, self.mean2.shape)
            )
        self.covs = [np.asarray(c, dtype=float) for c in self.covs]
        dims = self.mean1.shape
        if len(self.covs) != len(dims) or any(
            c.shape != (d, d) for c, d in zip(self.covs, dims)
        ):
            raise ValueError(
                "need one covariance of shape (d_m, d_m) per mode of %r" % (dims,)
            )
        for c in self.covs:
            linalg.chol_factor(c)  # raises if not positive definite
        if (
            self.prior1 <= 0.0
            or self.prior2 <= 0.0
            or abs(self.prior1 + self.prior2 - 1.0) > _PRIOR_TOL
        ):
            raise ValueError(
                "priors must be positive and sum to one, got (%g, %g)"
                % (self.prior1, self.prior2)
            )

    @property
    def dims(self):
        return self.mean1.shape


def fisher_discriminant(params):
    """Population discriminant tensor B = (M2 - M1) x_m Sigma_m^{-1}."""
    b = params.mean2 - params.mean1
    for m, cov in enumerate(params.covs):
        b = tensor.mode_product(b, linalg.sym_inverse(cov), m)
    return b


def fisher_snr(params):
    """Separation Delta = sqrt(<B, M2 - M1>)."""
    d = params.mean2 - params.mean1
    b = fisher_discriminant(params)
    val = tensor.inner(b, d)
    floor = -_SNR_TOL * tensor.frob_norm(b) * tensor.frob_norm(d)
    if val < floor:
        raise ValueError("discriminant inner product is negative (%g)" % val)
    return math.sqrt(max(val, 0.0))


def normal_cdf(x):
    """Standard normal CDF, accurate to well below 1e-12."""
    return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))


def bayes_error(delta, prior1=0.5, prior2=0.5):
    """Risk of the optimal rule at separation `delta` and the given priors."""
    if delta < 0.0:
        raise ValueError("separation must not be negative, got %g" % delta)
    if (
        prior1 <= 0.0
        or prior2 <= 0.0
        or abs(prior1 + prior2 - 1.0) > _PRIOR_TOL
    ):
        raise ValueError(
            "priors must be positive and sum to one, got (%g, %g)"
            % (prior1, prior2)
        )
    if delta == 0.0:
        if abs(prior1 - prior2) <= _PRIOR_TOL:
            return 0.5
        raise ValueError("zero separation is undefined with unequal priors")
    c = math.log(prior2 / prior1)
    return prior1 * normal_cdf(c / delta - delta / 2.0) + prior2 * (
        1.0 - normal_cdf(c / delta + delta / 2.0)
    )


def sample_tensor_normal(rng, mean, covs, n, chols=None):
    """Draw `n` tensor-normal samples; returns shape (n, *dims).

    Pass `chols` to reuse precomputed Cholesky factors of `covs`.
    """
    mean = np.asarray(mean, dtype=float)
    if chols is None:
        chols = [linalg.chol_factor(c) for c in covs]
    x = standard_normals(rng, (int(n),) + mean.shape)
    for m, l in enumerate(chols):
        x = tensor.mode_product(x, l, m + 1)
    return x + mean[None]


def sample_tgmm(rng, params, n1, n2):
    """Draw per-class samples (class 1 first) from the mixture."""
    chols = [linalg.chol_factor(c) for c in params.covs]
    x1 = sample_tensor_normal(rng, params.mean1, params.covs, n1, chols=chols)
    x2 = sample_tensor_normal(rng, params.mean2, params.covs, n2, chols=chols)
    return x1, x2
