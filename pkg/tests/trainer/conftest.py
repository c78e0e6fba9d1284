"""
Fixtures for the trainer tests.
"""

import pytest

from hfr_aligner.trainer import ToyModel, make_motion_dataset


@pytest.fixture
def small_dataset():
    """Eight training and eight test clips of one second each."""
    return make_motion_dataset(seed=0, n_train=8, n_test=8, duration_s=1.0)


@pytest.fixture
def model():
    return ToyModel.create(seed=0, fps=16)
