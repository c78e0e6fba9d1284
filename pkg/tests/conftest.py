"""
Configuration for pytest.

This file contains fixtures that are available to all test files.
"""

import os
import sys
from typing import Callable, List

import numpy as np
import pytest

# Add the parent directory to sys.path to make the module importable
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from hfr_aligner.aligner.params import SingleFrameAlignerParams  # noqa: E402
from hfr_aligner.features.encoder import EncoderStub  # noqa: E402
from hfr_aligner.features.frames import FrameFeatures  # noqa: E402
from hfr_aligner.numerics.tensor import Precision  # noqa: E402


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test run draws the same numbers."""
    return np.random.default_rng(1234)


@pytest.fixture
def encoder() -> EncoderStub:
    """Desk-scale encoder: 32x32 frames, 4x4 patches, 24 features."""
    return EncoderStub.from_seed(0)


@pytest.fixture
def base_params() -> SingleFrameAlignerParams:
    """Desk-scale single-frame aligner with d=24, h=32."""
    return SingleFrameAlignerParams.random(24, 32, seed=5)


@pytest.fixture
def make_seq(rng: np.random.Generator) -> Callable[..., List[FrameFeatures]]:
    """Factory for random feature sequences of shape (n, p, d)."""

    def _make(n: int, p: int = 16, d: int = 24, precision: Precision = Precision.FLOAT32) -> List[FrameFeatures]:
        return [
            FrameFeatures(z=rng.standard_normal((p, d)).astype(precision.dtype), frame_index=i, timestamp_s=i / 16)
            for i in range(n)
        ]

    return _make


@pytest.fixture
def constant_seq(rng: np.random.Generator) -> Callable[..., List[FrameFeatures]]:
    """Factory for sequences whose frames are constant within each second."""

    def _make(seconds: int, fps: int = 16, p: int = 16, d: int = 24) -> List[FrameFeatures]:
        seq = []
        for sec in range(seconds):
            z = rng.standard_normal((p, d)).astype(np.float32)
            seq.extend(
                FrameFeatures(z=z, frame_index=sec * fps + i, timestamp_s=(sec * fps + i) / fps) for i in range(fps)
            )
        return seq

    return _make
