"""
Finite-difference gradient oracle.

Central differences computed in 64-bit mode, used to verify every hand-written
backward pass.
"""

import logging
from typing import Callable

import numpy as np

from hfr_aligner.exceptions import ConfigError, OracleError
from hfr_aligner.numerics.tensor import Tensor

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5


def finite_difference_gradient(
    f: Callable[[Tensor], float],
    x: Tensor,
    step: float = DEFAULT_STEP,
) -> Tensor:
    """Estimate the gradient of a scalar function by central differences.

    Args:
        f: Scalar-valued function of a tensor shaped like ``x``
        x: Point at which to differentiate (promoted to float64)
        step: Perturbation size epsilon

    Returns:
        Float64 tensor of ``(f(x + eps e_i) - f(x - eps e_i)) / (2 eps)``

    Raises:
        ConfigError: If step is not positive
        OracleError: If ``f`` returns a non-finite value
    """
    if not step > 0:
        raise ConfigError("step", step, "must be positive")

    point = np.array(x, dtype=np.float64, copy=True)
    grad = np.zeros_like(point)
    flat = point.reshape(-1)
    out = grad.reshape(-1)

    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        f_plus = float(f(point))
        flat[i] = original - step
        f_minus = float(f(point))
        flat[i] = original
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise OracleError("non-finite function value", np.unravel_index(i, point.shape))
        out[i] = (f_plus - f_minus) / (2.0 * step)

    return grad


def relative_error(analytic: Tensor, numeric: Tensor) -> float:
    """Norm-wise relative error ``|a - n| / max(|a| + |n|, 1e-12)``."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    denom = max(float(np.linalg.norm(a) + np.linalg.norm(n)), 1e-12)
    return float(np.linalg.norm(a - n)) / denom
