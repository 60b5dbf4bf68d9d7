"""Tensor kernel tests.

The oracles below implement the 1-based colexicographic index maps and
brute-force contractions directly, independent of the library's
transpose/reshape implementation.
"""

import math

import numpy as np
import pytest

from cplda import tensor


def oracle_vec(x):
    dims = x.shape
    out = np.zeros(x.size, dtype=x.dtype)
    for idx in np.ndindex(*dims):
        offset = 0
        stride = 1
        for m in range(x.ndim):
            offset += idx[m] * stride
            stride *= dims[m]
        out[offset] = x[idx]
    return out


def oracle_unfold(x, mode):
    # row i_m, column j = 1 + sum_{k != m} (i_k - 1) prod_{l < k, l != m} d_l
    dims = x.shape
    cols = x.size // dims[mode]
    out = np.zeros((dims[mode], cols), dtype=x.dtype)
    for idx in np.ndindex(*dims):
        j = 1
        for k in range(x.ndim):
            if k == mode:
                continue
            stride = 1
            for l in range(k):
                if l != mode:
                    stride *= dims[l]
            j += idx[k] * stride
        out[idx[mode], j - 1] = x[idx]
    return out


def oracle_unfold_modes(x, modes):
    dims = x.shape
    rows = sorted(modes)
    cols = [m for m in range(x.ndim) if m not in set(rows)]
    d_rows = int(np.prod([dims[m] for m in rows], dtype=np.int64))
    d_cols = x.size // d_rows
    out = np.zeros((d_rows, d_cols), dtype=x.dtype)
    for idx in np.ndindex(*dims):
        i = 0
        stride = 1
        for m in rows:
            i += idx[m] * stride
            stride *= dims[m]
        j = 0
        stride = 1
        for m in cols:
            j += idx[m] * stride
            stride *= dims[m]
        out[i, j] = x[idx]
    return out


def oracle_mode_product(x, a, mode):
    dims = list(x.shape)
    dims[mode] = a.shape[0]
    out = np.zeros(dims, dtype=np.result_type(x, a))
    for idx in np.ndindex(*out.shape):
        acc = 0.0
        for j in range(x.shape[mode]):
            src = list(idx)
            src[mode] = j
            acc += a[idx[mode], j] * x[tuple(src)]
        out[idx] = acc
    return out


def oracle_inner(x, y):
    return math.fsum(
        float(x[idx]) * float(y[idx]) for idx in np.ndindex(*x.shape)
    )


def oracle_cp_compose(weights, factors):
    dims = [f.shape[0] for f in factors]
    out = np.zeros(dims)
    for r, w in enumerate(weights):
        for idx in np.ndindex(*out.shape):
            term = w
            for m, f in enumerate(factors):
                term *= f[idx[m], r]
            out[idx] += term
    return out


def random_dims(rng, max_order=4, max_dim=4):
    order = int(rng.integers(1, max_order + 1))
    return tuple(int(rng.integers(1, max_dim + 1)) for _ in range(order))


class TestVec:
    def test_matches_index_map_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            x = rng.normal(size=random_dims(rng))
            assert np.array_equal(tensor.vec(x), oracle_vec(x))

    def test_first_index_fastest(self):
        x = np.arange(1.0, 13.0)
        t = tensor.unvec(x, (2, 3, 2))
        assert t[0, 0, 0] == 1.0
        assert t[1, 0, 0] == 2.0
        assert t[0, 1, 0] == 3.0
        assert t[0, 0, 1] == 7.0

    def test_unvec_round_trip(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            dims = random_dims(rng)
            x = rng.normal(size=dims)
            assert np.array_equal(tensor.unvec(tensor.vec(x), dims), x)

    def test_unvec_size_mismatch(self):
        with pytest.raises(ValueError, match="size"):
            tensor.unvec(np.zeros(5), (2, 3))


class TestUnfold:
    def test_matches_index_map_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            x = rng.normal(size=random_dims(rng))
            for mode in range(x.ndim):
                assert np.array_equal(
                    tensor.unfold(x, mode), oracle_unfold(x, mode)
                )

    def test_frozen_2x3x2(self):
        # vec = 1..12 in colexicographic order
        x = tensor.unvec(np.arange(1.0, 13.0), (2, 3, 2))
        expected = np.array(
            [[1.0, 2.0, 7.0, 8.0], [3.0, 4.0, 9.0, 10.0], [5.0, 6.0, 11.0, 12.0]]
        )
        assert np.array_equal(tensor.unfold(x, 1), expected)

    def test_matrix_modes(self):
        x = tensor.unvec(np.arange(1.0, 5.0), (2, 2))
        assert np.array_equal(tensor.unfold(x, 0), x)
        assert np.array_equal(tensor.unfold(x, 1), x.T)

    def test_fold_round_trip_bitwise(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            dims = random_dims(rng)
            x = rng.normal(size=dims)
            for mode in range(x.ndim):
                back = tensor.fold(tensor.unfold(x, mode), mode, dims)
                assert np.array_equal(back, x)

    def test_mode_out_of_range(self):
        x = np.zeros((2, 3))
        with pytest.raises(ValueError, match="mode 2.*order 2"):
            tensor.unfold(x, 2)
        with pytest.raises(ValueError, match="mode -1"):
            tensor.unfold(x, -1)


class TestUnfoldModes:
    def test_matches_index_map_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            dims = random_dims(rng)
            x = rng.normal(size=dims)
            order = x.ndim
            for size in range(1, order + 1):
                for _ in range(3):
                    modes = tuple(
                        sorted(rng.choice(order, size=size, replace=False))
                    )
                    assert np.array_equal(
                        tensor.unfold_modes(x, modes),
                        oracle_unfold_modes(x, modes),
                    )

    def test_frozen_pair_2x2x2(self):
        x = tensor.unvec(np.arange(1.0, 9.0), (2, 2, 2))
        expected = np.array([[1.0, 5.0], [2.0, 6.0], [3.0, 7.0], [4.0, 8.0]])
        assert np.array_equal(tensor.unfold_modes(x, (0, 1)), expected)

    def test_mode_order_irrelevant(self):
        rng = np.random.default_rng(32)
        x = rng.normal(size=(2, 3, 4))
        assert np.array_equal(
            tensor.unfold_modes(x, (2, 0)), tensor.unfold_modes(x, (0, 2))
        )

    def test_single_mode_matches_unfold(self):
        rng = np.random.default_rng(33)
        x = rng.normal(size=(3, 2, 4))
        for mode in range(3):
            assert np.array_equal(
                tensor.unfold_modes(x, (mode,)), tensor.unfold(x, mode)
            )

    def test_fold_modes_round_trip_bitwise(self):
        rng = np.random.default_rng(34)
        for _ in range(60):
            dims = random_dims(rng)
            x = rng.normal(size=dims)
            order = x.ndim
            for size in range(1, order + 1):
                modes = tuple(
                    sorted(rng.choice(order, size=size, replace=False))
                )
                mat = tensor.unfold_modes(x, modes)
                assert np.array_equal(
                    tensor.fold_modes(mat, modes, dims), x
                )

    def test_empty_or_duplicate_modes(self):
        x = np.zeros((2, 2))
        with pytest.raises(ValueError, match="empty"):
            tensor.unfold_modes(x, ())
        with pytest.raises(ValueError, match="duplicate"):
            tensor.unfold_modes(x, (0, 0))


class TestModeProduct:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            dims = random_dims(rng, max_order=3, max_dim=4)
            x = rng.normal(size=dims)
            mode = int(rng.integers(0, x.ndim))
            a = rng.normal(size=(int(rng.integers(1, 5)), dims[mode]))
            got = tensor.mode_product(x, a, mode)
            assert np.allclose(got, oracle_mode_product(x, a, mode), atol=1e-12)

    def test_identity_is_noop(self):
        rng = np.random.default_rng(42)
        x = rng.normal(size=(3, 4, 2))
        for mode in range(3):
            assert np.allclose(
                tensor.mode_product(x, np.eye(x.shape[mode]), mode), x
            )

    def test_distinct_modes_commute(self):
        rng = np.random.default_rng(43)
        x = rng.normal(size=(3, 4, 2))
        a = rng.normal(size=(5, 3))
        b = rng.normal(size=(2, 4))
        xy = tensor.mode_product(tensor.mode_product(x, a, 0), b, 1)
        yx = tensor.mode_product(tensor.mode_product(x, b, 1), a, 0)
        assert np.allclose(xy, yx, atol=1e-12)

    def test_same_mode_composes(self):
        rng = np.random.default_rng(44)
        x = rng.normal(size=(3, 2, 2))
        a = rng.normal(size=(4, 3))
        b = rng.normal(size=(5, 4))
        twice = tensor.mode_product(tensor.mode_product(x, a, 0), b, 0)
        once = tensor.mode_product(x, b @ a, 0)
        assert np.allclose(twice, once, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="columns"):
            tensor.mode_product(np.zeros((2, 3)), np.zeros((4, 5)), 0)


class TestContractions:
    def test_contract_all_but_matches_brute_force(self):
        rng = np.random.default_rng(51)
        for _ in range(100):
            dims = random_dims(rng, max_order=4, max_dim=4)
            if len(dims) == 1:
                continue
            x = rng.normal(size=dims)
            keep = int(rng.integers(0, x.ndim))
            vectors = {
                m: rng.normal(size=dims[m])
                for m in range(x.ndim)
                if m != keep
            }
            got = tensor.contract_all_but(x, vectors, keep)
            want = x
            for m in sorted(vectors, reverse=True):
                want = oracle_mode_product(want, vectors[m][None, :], m)
                want = np.squeeze(want, axis=m)
            assert np.allclose(got, np.atleast_1d(want), atol=1e-12)

    def test_contract_all_matches_inner_of_rank_one(self):
        rng = np.random.default_rng(52)
        for _ in range(50):
            dims = random_dims(rng, max_order=3, max_dim=4)
            x = rng.normal(size=dims)
            vectors = [rng.normal(size=d) for d in dims]
            got = tensor.contract_all(x, vectors)
            rank_one = oracle_cp_compose([1.0], [v[:, None] for v in vectors])
            assert np.isclose(got, oracle_inner(x, rank_one), atol=1e-10)

    def test_contract_all_but_requires_all_other_modes(self):
        x = np.zeros((2, 2, 2))
        with pytest.raises(ValueError, match="mode"):
            tensor.contract_all_but(x, {1: np.ones(2)}, 0)


class TestInnerNorm:
    def test_inner_matches_brute_force(self):
        rng = np.random.default_rng(61)
        for _ in range(100):
            dims = random_dims(rng)
            x = rng.normal(size=dims)
            y = rng.normal(size=dims)
            assert np.isclose(
                tensor.inner(x, y), oracle_inner(x, y), rtol=1e-12, atol=1e-12
            )

    def test_inner_of_self_is_squared_norm(self):
        rng = np.random.default_rng(62)
        x = rng.normal(size=(3, 4, 2))
        assert np.isclose(tensor.inner(x, x), tensor.frob_norm(x) ** 2)

    def test_norm_invariant_under_unfolding(self):
        rng = np.random.default_rng(63)
        x = rng.normal(size=(3, 2, 4))
        for mode in range(3):
            assert np.isclose(
                tensor.frob_norm(x),
                np.linalg.norm(tensor.unfold(x, mode)),
            )

    def test_inner_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            tensor.inner(np.zeros((2, 3)), np.zeros((3, 2)))


class TestCpCompose:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(71)
        for _ in range(50):
            order = int(rng.integers(2, 5))
            dims = tuple(int(rng.integers(2, 5)) for _ in range(order))
            r = int(rng.integers(1, 4))
            factors = [rng.normal(size=(d, r)) for d in dims]
            factors = [f / np.linalg.norm(f, axis=0) for f in factors]
            weights = rng.uniform(0.5, 2.0, size=r)
            got = tensor.cp_compose(weights, factors)
            assert np.allclose(got, oracle_cp_compose(weights, factors), atol=1e-12)

    def test_rank_one_norm_is_weight(self):
        rng = np.random.default_rng(72)
        factors = [rng.normal(size=(d, 1)) for d in (3, 4, 2)]
        factors = [f / np.linalg.norm(f) for f in factors]
        x = tensor.cp_compose([2.5], factors)
        assert np.isclose(tensor.frob_norm(x), 2.5)

    def test_factor_count_mismatch(self):
        with pytest.raises(ValueError, match="factor"):
            tensor.cp_compose([1.0], [np.ones((2, 2)), np.ones((2, 1))])
