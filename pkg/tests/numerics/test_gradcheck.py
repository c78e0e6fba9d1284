"""
Tests for the finite-difference oracle.
"""

import numpy as np
import pytest

from hfr_aligner.exceptions import ConfigError, OracleError
from hfr_aligner.numerics.gradcheck import finite_difference_gradient, relative_error


def test_sum_of_squares():
    grad = finite_difference_gradient(lambda v: float(np.sum(v**2)), np.array([1.0, 2.0]))
    np.testing.assert_allclose(grad, [2.0, 4.0], atol=1e-8)


def test_promotes_to_float64():
    grad = finite_difference_gradient(lambda v: float(np.sum(v)), np.ones(3, dtype=np.float32))
    assert grad.dtype == np.float64


def test_does_not_mutate_input():
    x = np.array([1.0, 2.0, 3.0])
    finite_difference_gradient(lambda v: float(np.sum(v**3)), x)
    np.testing.assert_array_equal(x, [1.0, 2.0, 3.0])


@pytest.mark.parametrize("step", [0.0, -1e-5])
def test_rejects_non_positive_step(step):
    with pytest.raises(ConfigError):
        finite_difference_gradient(lambda v: 0.0, np.ones(2), step=step)


def test_non_finite_value_names_the_element():
    def f(v):
        return float("inf") if v[1] > 2.0 else float(np.sum(v))

    with pytest.raises(OracleError) as excinfo:
        finite_difference_gradient(f, np.array([0.0, 2.0]))
    assert excinfo.value.index == (1,)


def test_relative_error():
    assert relative_error(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0
    assert relative_error(np.zeros(3), np.zeros(3)) == 0.0
    assert relative_error(np.array([1.0]), np.array([-1.0])) == pytest.approx(1.0)
