"""
Frame-level data structures: raw videos, per-frame features and processing windows.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Tuple

import numpy as np

from hfr_aligner.exceptions import ShapeError
from hfr_aligner.numerics.ops import concat_feature_dim
from hfr_aligner.numerics.tensor import Tensor, all_finite, check_rank, isqrt_exact


@dataclass(frozen=True)
class RawVideo:
    """Grayscale frames of side ``s`` with pixels in [0, 1]."""

    frames: Tensor  # (n, s, s)
    native_fps: int
    duration_s: float

    def __post_init__(self) -> None:
        check_rank("RawVideo.frames", self.frames, 3)
        expected = int(round(self.native_fps * self.duration_s))
        if self.frames.shape[0] != expected:
            raise ShapeError("RawVideo frame count", expected, self.frames.shape[0])

    @property
    def side(self) -> int:
        return int(self.frames.shape[1])

    def __len__(self) -> int:
        return int(self.frames.shape[0])


@dataclass(frozen=True)
class FrameFeatures:
    """Encoder output for one frame: a (p, d) matrix plus its source position.

    ``timestamp_s`` is rounded to float32 so that archives round-trip exactly.
    """

    z: Tensor
    frame_index: int
    timestamp_s: float

    def __post_init__(self) -> None:
        check_rank("FrameFeatures.z", self.z, 2)
        isqrt_exact(self.z.shape[0])
        object.__setattr__(self, "timestamp_s", float(np.float32(self.timestamp_s)))

    @property
    def num_patches(self) -> int:
        return int(self.z.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.z.shape[1])

    def is_finite(self) -> bool:
        return all_finite(self.z)


@dataclass(frozen=True)
class WindowBatch:
    """``w`` consecutive frames processed together.

    ``padding`` counts trailing frames that repeat the last real frame.
    """

    frames: Tuple[FrameFeatures, ...]
    window_index: int
    padding: int = field(default=0)

    def __post_init__(self) -> None:
        if not self.frames:
            raise ShapeError("WindowBatch", "at least one frame", 0)
        indices = [f.frame_index for f in self.frames]
        if any(b < a for a, b in zip(indices, indices[1:])):
            raise ShapeError("WindowBatch frame order", "non-decreasing frame_index", indices)

    @property
    def width(self) -> int:
        return len(self.frames)

    @cached_property
    def concat(self) -> Tensor:
        """Column-concatenated features of shape (p, w*d)."""
        return concat_feature_dim([f.z for f in self.frames])

    def real_frames(self) -> List[FrameFeatures]:
        return list(self.frames[: self.width - self.padding])
