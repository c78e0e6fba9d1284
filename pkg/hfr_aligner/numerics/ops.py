"""
Dense kernels with forward and backward passes.

All functions are pure: inputs are never mutated and outputs are fresh arrays.
Outputs keep 32-bit precision unless an input is 64-bit.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.special import ndtr

from hfr_aligner.exceptions import ShapeError
from hfr_aligner.numerics.tensor import Tensor, check_rank, isqrt_exact, result_dtype

logger = logging.getLogger(__name__)

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def linear(x: Tensor, W: Tensor, b: Tensor) -> Tensor:
    """Affine map ``x @ W + b`` over rows.

    Args:
        x: Input of shape (n, a)
        W: Weights of shape (a, b)
        b: Bias of shape (b,)

    Returns:
        Output of shape (n, b)

    Raises:
        ShapeError: If inner or bias dims disagree
    """
    check_rank("linear input", x, 2)
    check_rank("linear weight", W, 2)
    if x.shape[1] != W.shape[0]:
        raise ShapeError("linear", f"input width {W.shape[0]}", f"input width {x.shape[1]}")
    if b.shape != (W.shape[1],):
        raise ShapeError("linear bias", (W.shape[1],), b.shape)
    dtype = result_dtype(x, W, b)
    out = np.matmul(x.astype(dtype, copy=False), W.astype(dtype, copy=False))
    out += b.astype(dtype, copy=False)
    return out


def linear_backward(grad_out: Tensor, x: Tensor, W: Tensor) -> Tuple[Tensor, Tensor, Tensor]:
    """Gradients of :func:`linear` with respect to ``x``, ``W`` and ``b``."""
    if grad_out.shape != (x.shape[0], W.shape[1]):
        raise ShapeError("linear_backward", (x.shape[0], W.shape[1]), grad_out.shape)
    dx = grad_out @ W.T
    dW = x.T @ grad_out
    db = grad_out.sum(axis=0)
    return dx, dW, db


def gelu(x: Tensor) -> Tensor:
    """Exact GELU, ``x * Phi(x)`` with Phi the standard normal CDF."""
    return (x * ndtr(x)).astype(x.dtype, copy=False)


def gelu_backward(grad_out: Tensor, x: Tensor) -> Tensor:
    if grad_out.shape != x.shape:
        raise ShapeError("gelu_backward", x.shape, grad_out.shape)
    pdf = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return (grad_out * (ndtr(x) + x * pdf)).astype(x.dtype, copy=False)


def _blocks(grid: Tensor) -> Tensor:
    """View a (g, g, h) grid as (g//2, g//2, 4, h) disjoint 2x2 blocks, row-major within a block."""
    g, _, h = grid.shape
    half = g // 2
    trimmed = grid[: 2 * half, : 2 * half, :]
    return trimmed.reshape(half, 2, half, 2, h).transpose(0, 2, 1, 3, 4).reshape(half, half, 4, h)


def _check_grid(operation: str, grid: Tensor) -> None:
    check_rank(operation, grid, 3)
    if grid.shape[0] != grid.shape[1]:
        raise ShapeError(operation, "square spatial grid", grid.shape)
    if grid.shape[0] < 2:
        raise ShapeError(operation, "grid side >= 2", grid.shape[0])


def max_pool_2x2(grid: Tensor) -> Tensor:
    """Spatial 2x2 max pooling over a (g, g, h) grid.

    An odd last row/column is dropped, giving a (g//2, g//2, h) output.

    Raises:
        ShapeError: If the grid is not square rank-3 or g < 2
    """
    _check_grid("max_pool_2x2", grid)
    return np.ascontiguousarray(_blocks(grid).max(axis=2))


def max_pool_2x2_backward(grad_out: Tensor, grid: Tensor) -> Tensor:
    """Route each output gradient to the argmax cell of its block.

    Ties go to the first cell in row-major order.
    """
    _check_grid("max_pool_2x2_backward", grid)
    g, _, h = grid.shape
    half = g // 2
    if grad_out.shape != (half, half, h):
        raise ShapeError("max_pool_2x2_backward", (half, half, h), grad_out.shape)

    arg = _blocks(grid).argmax(axis=2)
    routed = np.zeros((half, half, 4, h), dtype=result_dtype(grad_out, grid))
    np.put_along_axis(routed, arg[:, :, None, :], grad_out[:, :, None, :], axis=2)

    dgrid = np.zeros((g, g, h), dtype=routed.dtype)
    dgrid[: 2 * half, : 2 * half, :] = (
        routed.reshape(half, half, 2, 2, h).transpose(0, 2, 1, 3, 4).reshape(2 * half, 2 * half, h)
    )
    return dgrid


def concat_feature_dim(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate (p, d_i) matrices along the feature (column) dimension.

    Raises:
        ShapeError: If the list is empty or row counts differ
    """
    if not parts:
        raise ShapeError("concat_feature_dim", "at least one part", 0)
    rows = parts[0].shape[0]
    for part in parts:
        check_rank("concat_feature_dim", part, 2)
        if part.shape[0] != rows:
            raise ShapeError("concat_feature_dim", f"{rows} rows", f"{part.shape[0]} rows")
    if len(parts) == 1:
        return parts[0]
    return np.concatenate(parts, axis=1)


def grid_from_rows(rows: Tensor) -> Tensor:
    """Reshape (p, c) rows in row-major patch order into a (sqrt(p), sqrt(p), c) grid."""
    check_rank("grid_from_rows", rows, 2)
    side = isqrt_exact(rows.shape[0])
    return rows.reshape(side, side, rows.shape[1])


def pool_rows(rows: Tensor) -> Tensor:
    """Max-pool (p, c) patch rows spatially, returning (floor(sqrt(p)/2)**2, c) rows."""
    pooled = max_pool_2x2(grid_from_rows(rows))
    return pooled.reshape(-1, rows.shape[1])


def pool_rows_backward(grad_out: Tensor, rows: Tensor) -> Tensor:
    grid = grid_from_rows(rows)
    half = grid.shape[0] // 2
    dgrid = max_pool_2x2_backward(grad_out.reshape(half, half, rows.shape[1]), grid)
    return dgrid.reshape(rows.shape)


def pooled_count(p: int) -> int:
    """Token count ``floor(sqrt(p)/2)**2`` after spatial pooling."""
    return (isqrt_exact(p) // 2) ** 2
