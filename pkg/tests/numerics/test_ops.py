"""
Tests for the dense kernels.
"""

import itertools

import numpy as np
import pytest
from scipy.special import erf

from hfr_aligner.exceptions import ShapeError
from hfr_aligner.numerics.gradcheck import finite_difference_gradient, relative_error
from hfr_aligner.numerics.ops import (
    concat_feature_dim,
    gelu,
    gelu_backward,
    linear,
    linear_backward,
    max_pool_2x2,
    max_pool_2x2_backward,
    pool_rows,
    pooled_count,
)


class TestLinear:
    def test_identity(self):
        out = linear(np.array([[1.0, 2.0]]), np.eye(2), np.zeros(2))
        np.testing.assert_array_equal(out, [[1.0, 2.0]])

    def test_weighted_sum_plus_bias(self):
        out = linear(np.array([[1.0, 1.0]]), np.array([[2.0], [3.0]]), np.array([1.0]))
        np.testing.assert_array_equal(out, [[6.0]])

    def test_keeps_float32(self):
        x = np.ones((3, 2), dtype=np.float32)
        out = linear(x, np.ones((2, 4), dtype=np.float32), np.zeros(4, dtype=np.float32))
        assert out.dtype == np.float32

    def test_inner_dim_mismatch_names_both_dims(self):
        with pytest.raises(ShapeError) as excinfo:
            linear(np.ones((2, 3)), np.ones((4, 5)), np.zeros(5))
        assert "3" in str(excinfo.value)
        assert "4" in str(excinfo.value)

    def test_bias_mismatch(self):
        with pytest.raises(ShapeError):
            linear(np.ones((2, 3)), np.ones((3, 5)), np.zeros(4))

    @pytest.mark.parametrize("seed", range(100))
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((3, 4))
        W = rng.standard_normal((4, 2))
        b = rng.standard_normal(2)
        G = rng.standard_normal((3, 2))
        dx, dW, db = linear_backward(G, x, W)

        assert relative_error(dx, finite_difference_gradient(lambda v: np.sum(G * linear(v, W, b)), x)) <= 1e-6
        assert relative_error(dW, finite_difference_gradient(lambda v: np.sum(G * linear(x, v, b)), W)) <= 1e-6
        assert relative_error(db, finite_difference_gradient(lambda v: np.sum(G * linear(x, W, v)), b)) <= 1e-6

    def test_backward_of_examples(self):
        x = np.array([[1.0, 1.0]])
        W = np.array([[2.0], [3.0]])
        dx, dW, db = linear_backward(np.array([[1.0]]), x, W)
        np.testing.assert_array_equal(dx, [[2.0, 3.0]])
        np.testing.assert_array_equal(dW, [[1.0], [1.0]])
        np.testing.assert_array_equal(db, [1.0])


class TestGelu:
    def test_zero(self):
        assert gelu(np.array([0.0]))[0] == 0.0

    def test_odd_part_is_identity(self, rng):
        x = rng.uniform(-10, 10, 1000)
        np.testing.assert_allclose(gelu(x) - gelu(-x), x, rtol=0, atol=1e-12)

    def test_matches_erf_formulation(self):
        expected = 3.0 * 0.5 * (1.0 + erf(3.0 / np.sqrt(2.0)))
        assert abs(gelu(np.array([3.0]))[0] - expected) < 1e-12
        assert abs(gelu(np.array([3.0]))[0] - 2.9960) < 1e-3

    def test_finite_on_bounded_input(self):
        x = np.linspace(-1e3, 1e3, 2001, dtype=np.float32)
        assert np.all(np.isfinite(gelu(x)))
        assert np.all(np.isfinite(gelu_backward(np.ones_like(x), x)))

    @pytest.mark.parametrize("seed", range(100))
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((3, 5)) * 2
        G = rng.standard_normal((3, 5))
        numeric = finite_difference_gradient(lambda v: np.sum(G * gelu(v)), x)
        assert relative_error(gelu_backward(G, x), numeric) <= 1e-6


class TestMaxPool:
    def test_max_of_four(self):
        grid = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(2, 2, 1)
        np.testing.assert_array_equal(max_pool_2x2(grid).reshape(-1), [4.0])

    def test_odd_side_drops_last_row_and_column(self):
        grid = np.arange(9, dtype=np.float64).reshape(3, 3, 1)
        grid[2, :, 0] = 100.0
        grid[:, 2, 0] = 100.0
        out = max_pool_2x2(grid)
        assert out.shape == (1, 1, 1)
        assert out[0, 0, 0] == 4.0

    def test_side_below_two(self):
        with pytest.raises(ShapeError):
            max_pool_2x2(np.ones((1, 1, 3)))

    def test_constant_grid_routes_gradient_to_first_cell(self):
        grid = np.full((4, 4, 2), 7.0)
        np.testing.assert_array_equal(max_pool_2x2(grid), np.full((2, 2, 2), 7.0))
        dgrid = max_pool_2x2_backward(np.ones((2, 2, 2)), grid)
        expected = np.zeros((4, 4, 2))
        expected[0::2, 0::2, :] = 1.0
        np.testing.assert_array_equal(dgrid, expected)

    def test_brute_force_binary_grids(self):
        # every 4x4 binary pattern, one per channel
        bits = np.arange(1 << 16)
        grid = ((bits[None, :] >> np.arange(16)[:, None]) & 1).astype(np.float32).reshape(4, 4, 1 << 16)
        out = max_pool_2x2(grid)
        for i, j in itertools.product(range(2), range(2)):
            block = grid[2 * i : 2 * i + 2, 2 * j : 2 * j + 2].reshape(4, -1)
            np.testing.assert_array_equal(out[i, j], block.max(axis=0))

    @pytest.mark.parametrize("seed", range(100))
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        grid = (rng.permutation(4 * 4 * 3) * 0.01).reshape(4, 4, 3)
        G = rng.standard_normal((2, 2, 3))
        numeric = finite_difference_gradient(lambda v: np.sum(G * max_pool_2x2(v)), grid)
        assert relative_error(max_pool_2x2_backward(G, grid), numeric) <= 1e-6

    @pytest.mark.parametrize("p, expected", [(4, 1), (9, 1), (16, 4), (25, 4), (729, 169)])
    def test_pooled_count(self, p, expected):
        assert pooled_count(p) == expected
        assert pool_rows(np.zeros((p, 3))).shape == (expected, 3)

    def test_pooled_count_rejects_non_square(self):
        with pytest.raises(ShapeError):
            pooled_count(10)


class TestConcat:
    def test_columns_in_order(self):
        out = concat_feature_dim([np.array([[1.0], [2.0]]), np.array([[3.0], [4.0]])])
        np.testing.assert_array_equal(out, [[1.0, 3.0], [2.0, 4.0]])

    def test_single_part_unchanged(self):
        part = np.arange(6, dtype=np.float32).reshape(3, 2)
        assert concat_feature_dim([part]) is part

    def test_window_of_parts(self, rng):
        parts = [rng.standard_normal((16, 24)).astype(np.float32) for _ in range(16)]
        out = concat_feature_dim(parts)
        assert out.shape == (16, 16 * 24)
        np.testing.assert_array_equal(out[:, 24 * 5 : 24 * 6], parts[5])

    def test_row_mismatch(self):
        with pytest.raises(ShapeError):
            concat_feature_dim([np.ones((2, 1)), np.ones((3, 1))])

    def test_empty(self):
        with pytest.raises(ShapeError):
            concat_feature_dim([])
