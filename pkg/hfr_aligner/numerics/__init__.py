"""
Numerics Package

Dense kernels with backward passes, the gradient oracle and the tensor archive.
"""

from .archive import read_archive, write_archive
from .gradcheck import finite_difference_gradient, relative_error
from .ops import (
    concat_feature_dim,
    gelu,
    gelu_backward,
    linear,
    linear_backward,
    max_pool_2x2,
    max_pool_2x2_backward,
    pooled_count,
)
from .tensor import GradPair, Precision, Tensor, as_tensor

__all__ = [
    "GradPair",
    "Precision",
    "Tensor",
    "as_tensor",
    "concat_feature_dim",
    "finite_difference_gradient",
    "gelu",
    "gelu_backward",
    "linear",
    "linear_backward",
    "max_pool_2x2",
    "max_pool_2x2_backward",
    "pooled_count",
    "read_archive",
    "relative_error",
    "write_archive",
]
