"""Sampling and population-quantity tests.

The normal CDF oracle is numerical quadrature of the density; the
tensor-normal covariance oracle is the explicit Kronecker product of the
mode covariances acting on colexicographic vectorizations.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from cplda import sampling, tensor
from cplda.exceptions import NotPositiveDefiniteError


def phi_oracle(x):
    # integrate the standard normal density from x to +inf, complement
    tail, _ = quad(
        lambda t: np.exp(-t * t / 2.0) / np.sqrt(2.0 * np.pi), x, np.inf
    )
    return 1.0 - tail


class TestRng:
    def test_substream_formula_frozen(self):
        assert sampling.substream_seed(0, 0) == 0
        assert sampling.substream_seed(0, 1) == 0x9E3779B97F4A7C15
        assert (
            sampling.substream_seed(12345, 2)
            == 12345 ^ ((2 * 0x9E3779B97F4A7C15) % 2**64)
        )

    def test_substreams_distinct(self):
        seeds = {sampling.substream_seed(7, i) for i in range(1000)}
        assert len(seeds) == 1000
        assert all(0 <= s < 2**64 for s in seeds)

    def test_same_seed_same_stream(self):
        a = sampling.standard_normals(sampling.make_rng(42), (1000,))
        b = sampling.standard_normals(sampling.make_rng(42), (1000,))
        assert np.array_equal(a, b)

    def test_different_substreams_differ(self):
        a = sampling.standard_normals(
            sampling.make_rng(sampling.substream_seed(42, 0)), (100,)
        )
        b = sampling.standard_normals(
            sampling.make_rng(sampling.substream_seed(42, 1)), (100,)
        )
        assert not np.allclose(a, b)

    def test_box_muller_moments(self):
        z = sampling.standard_normals(sampling.make_rng(7), (200000,))
        n = z.size
        assert abs(z.mean()) < 3.0 / np.sqrt(n)
        assert abs(z.var() - 1.0) < 3.0 * np.sqrt(2.0 / n)
        assert abs((z < 0).mean() - 0.5) < 3.0 * 0.5 / np.sqrt(n)
        assert abs((z**4).mean() - 3.0) < 0.1

    def test_odd_sizes_and_shape(self):
        z = sampling.standard_normals(sampling.make_rng(1), (3, 5, 7))
        assert z.shape == (3, 5, 7)
        assert np.isfinite(z).all()


class TestNormalCdfAndBayes:
    def test_cdf_against_quadrature(self):
        for x in (-3.0, -1.0, -0.25, 0.0, 0.5, 2.0):
            assert abs(sampling.normal_cdf(x) - phi_oracle(x)) < 1e-10

    def test_cdf_frozen_value(self):
        assert sampling.normal_cdf(-1.0) == pytest.approx(
            0.15865525393145705, abs=1e-14
        )

    def test_equal_priors_closed_form(self):
        for delta in (0.5, 1.0, 2.0, 4.0):
            want = phi_oracle(-delta / 2.0)
            assert sampling.bayes_error(delta) == pytest.approx(want, abs=1e-10)
        assert sampling.bayes_error(1.0) == pytest.approx(
            0.3085375387259869, abs=1e-12
        )

    def test_unequal_priors_against_quadrature(self):
        delta, p1, p2 = 1.5, 0.3, 0.7
        c = np.log(p2 / p1)
        want = p1 * phi_oracle(c / delta - delta / 2.0) + p2 * (
            1.0 - phi_oracle(c / delta + delta / 2.0)
        )
        assert sampling.bayes_error(delta, p1, p2) == pytest.approx(
            want, abs=1e-10
        )

    def test_zero_separation(self):
        assert sampling.bayes_error(0.0) == 0.5
        with pytest.raises(ValueError, match="prior"):
            sampling.bayes_error(0.0, 0.4, 0.6)

    def test_monotone_in_separation(self):
        grid = [sampling.bayes_error(d) for d in np.linspace(0.1, 6.0, 30)]
        assert all(a > b for a, b in zip(grid, grid[1:]))

    def test_large_separation_vanishes(self):
        assert sampling.bayes_error(20.0) < 1e-20

    def test_invalid_arguments(self):
        with pytest.raises(ValueError, match="negative"):
            sampling.bayes_error(-1.0)
        with pytest.raises(ValueError, match="prior"):
            sampling.bayes_error(1.0, 0.5, 0.6)


def small_params(rng, dims=(2, 3)):
    covs = []
    for d in dims:
        a = rng.normal(size=(d, d))
        covs.append(a @ a.T + d * np.eye(d))
    mean1 = rng.normal(size=dims)
    mean2 = rng.normal(size=dims)
    return sampling.TgmmParams(mean1=mean1, mean2=mean2, covs=covs)


class TestTgmmParams:
    def test_validation_errors(self):
        ok = small_params(np.random.default_rng(0))
        with pytest.raises(ValueError, match="prior"):
            sampling.TgmmParams(ok.mean1, ok.mean2, ok.covs, 0.6, 0.6)
        with pytest.raises(ValueError, match="shape"):
            sampling.TgmmParams(ok.mean1, ok.mean1.T, ok.covs)
        with pytest.raises(ValueError, match="covariance"):
            sampling.TgmmParams(ok.mean1, ok.mean2, ok.covs[:1])
        bad = [c.copy() for c in ok.covs]
        bad[0] = -bad[0]
        with pytest.raises(NotPositiveDefiniteError):
            sampling.TgmmParams(ok.mean1, ok.mean2, bad)

    def test_dims(self):
        p = small_params(np.random.default_rng(1))
        assert p.dims == (2, 3)


class TestFisherQuantities:
    def test_discriminant_matches_kronecker_oracle(self):
        rng = np.random.default_rng(201)
        for _ in range(20):
            p = small_params(rng)
            b = sampling.fisher_discriminant(p)
            d = p.mean2 - p.mean1
            kron = np.kron(p.covs[1], p.covs[0])
            want = np.linalg.solve(kron, tensor.vec(d))
            assert np.allclose(tensor.vec(b), want, atol=1e-8)

    def test_snr_matches_kronecker_oracle(self):
        rng = np.random.default_rng(202)
        for _ in range(20):
            p = small_params(rng)
            d = p.mean2 - p.mean1
            kron = np.kron(p.covs[1], p.covs[0])
            want = np.sqrt(tensor.vec(d) @ np.linalg.solve(kron, tensor.vec(d)))
            assert sampling.fisher_snr(p) == pytest.approx(want, rel=1e-8)

    def test_identity_covs_snr_is_mean_gap_norm(self):
        rng = np.random.default_rng(203)
        d = rng.normal(size=(3, 2, 2))
        p = sampling.TgmmParams(
            np.zeros((3, 2, 2)), d, [np.eye(3), np.eye(2), np.eye(2)]
        )
        assert sampling.fisher_snr(p) == pytest.approx(tensor.frob_norm(d))


class TestSampleTensorNormal:
    def test_mean_and_kronecker_covariance_recovered(self):
        rng = sampling.make_rng(301)
        p = small_params(np.random.default_rng(302))
        x = sampling.sample_tensor_normal(rng, p.mean1, p.covs, 6000)
        assert x.shape == (6000, 2, 3)
        flat = x.reshape(6000, -1, order="F") - tensor.vec(p.mean1)
        emp = flat.T @ flat / 6000
        want = np.kron(p.covs[1], p.covs[0])
        scale = np.max(np.abs(want))
        assert np.max(np.abs(emp - want)) < 0.06 * scale
        assert np.max(np.abs(flat.mean(axis=0))) < 3.0 * np.sqrt(scale / 6000)

    def test_deterministic(self):
        p = small_params(np.random.default_rng(303))
        a = sampling.sample_tensor_normal(sampling.make_rng(5), p.mean1, p.covs, 3)
        b = sampling.sample_tensor_normal(sampling.make_rng(5), p.mean1, p.covs, 3)
        assert np.array_equal(a, b)


class TestSampleTgmm:
    def test_shapes_and_determinism(self):
        p = small_params(np.random.default_rng(304))
        x1, x2 = sampling.sample_tgmm(sampling.make_rng(9), p, 4, 7)
        y1, y2 = sampling.sample_tgmm(sampling.make_rng(9), p, 4, 7)
        assert x1.shape == (4, 2, 3) and x2.shape == (7, 2, 3)
        assert np.array_equal(x1, y1) and np.array_equal(x2, y2)

    def test_class_means_separate(self):
        rng = np.random.default_rng(305)
        d = 3.0 * np.ones((2, 3)) / np.sqrt(6.0)
        p = sampling.TgmmParams(
            np.zeros((2, 3)), 5.0 * d, [np.eye(2), np.eye(3)]
        )
        x1, x2 = sampling.sample_tgmm(sampling.make_rng(10), p, 500, 500)
        gap = x2.mean(axis=0) - x1.mean(axis=0)
        assert np.allclose(gap, 5.0 * d, atol=0.3)
