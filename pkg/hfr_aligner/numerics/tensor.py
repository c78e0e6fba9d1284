"""
Tensor helpers.

Tensors are plain ``numpy.ndarray`` values of rank 1-3 holding 32-bit floats,
with a 64-bit mode reserved for verification runs.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
import numpy.typing as npt

from hfr_aligner.exceptions import ShapeError

logger = logging.getLogger(__name__)

Tensor = npt.NDArray[np.floating[Any]]

MAX_RANK = 3


class Precision(str, Enum):
    """Floating-point storage mode."""

    FLOAT32 = "float32"
    FLOAT64 = "float64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.value)


def as_tensor(values: Any, precision: Precision = Precision.FLOAT32) -> Tensor:
    """Convert array-like input into a contiguous tensor of the given precision.

    Raises:
        ShapeError: If the rank is outside 1-3 or a dimension is zero
    """
    arr = np.asarray(values, dtype=precision.dtype)
    if not 1 <= arr.ndim <= MAX_RANK:
        raise ShapeError("as_tensor", f"rank 1-{MAX_RANK}", f"rank {arr.ndim}")
    arr = np.ascontiguousarray(arr)
    if 0 in arr.shape:
        raise ShapeError("as_tensor", "positive dims", arr.shape)
    return arr


def result_dtype(*tensors: np.ndarray) -> np.dtype:
    """Common dtype of kernel inputs: float64 if any input is float64."""
    return np.dtype(np.float64) if any(t.dtype == np.float64 for t in tensors) else np.dtype(np.float32)


def check_rank(operation: str, x: np.ndarray, rank: int) -> None:
    if x.ndim != rank:
        raise ShapeError(operation, f"rank {rank}", f"rank {x.ndim} {x.shape}")


def check_dims(operation: str, expected: Sequence[int], actual: Sequence[int]) -> None:
    if tuple(expected) != tuple(actual):
        raise ShapeError(operation, tuple(expected), tuple(actual))


def all_finite(x: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(x)))


def isqrt_exact(p: int) -> int:
    """Side of a perfect square, or a ShapeError naming ``p``."""
    side = int(np.sqrt(p) + 0.5)
    if side * side != p:
        raise ShapeError("perfect-square patch count", f"{side * side} or {(side + 1) ** 2}", p)
    return side


@dataclass
class GradPair:
    """A value and its accumulated gradient."""

    value: Tensor
    grad: Tensor

    def __post_init__(self) -> None:
        check_dims("GradPair", self.value.shape, self.grad.shape)

    def descend(self, lr: float) -> None:
        """In-place gradient step ``value -= lr * grad``."""
        self.value -= self.value.dtype.type(lr) * self.grad
