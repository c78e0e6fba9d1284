"""
Frozen encoder stub.

Stands in for a pre-trained image encoder: every frame is cut into a grid of
patches and each flattened patch goes through one fixed random projection.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

import numpy as np

from hfr_aligner.exceptions import ShapeError
from hfr_aligner.features.frames import FrameFeatures, RawVideo
from hfr_aligner.numerics.archive import require
from hfr_aligner.numerics.tensor import Tensor, check_rank

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EncoderStub:
    """Per-patch linear featureizer with an immutable projection."""

    patch_grid: int
    patch_size: int
    proj: Tensor  # (patch_dim, d)

    def __post_init__(self) -> None:
        check_rank("EncoderStub.proj", self.proj, 2)
        if self.proj.shape[0] != self.patch_dim:
            raise ShapeError("EncoderStub.proj rows", self.patch_dim, self.proj.shape[0])
        self.proj.flags.writeable = False

    @classmethod
    def from_seed(cls, seed: int, side: int = 32, patch_grid: int = 4, feature_dim: int = 24) -> "EncoderStub":
        """Build an encoder whose projection is drawn from ``seed``.

        Projection entries have standard deviation 2/patch_size, so a patch
        holding the whole dot maps to features of order one.
        """
        if side % patch_grid:
            raise ShapeError("EncoderStub side", f"multiple of {patch_grid}", side)
        patch_size = side // patch_grid
        patch_dim = patch_size * patch_size
        rng = np.random.default_rng(seed)
        proj = rng.standard_normal((patch_dim, feature_dim)) * (2.0 / patch_size)
        return cls(patch_grid=patch_grid, patch_size=patch_size, proj=proj.astype(np.float32))

    @property
    def patch_dim(self) -> int:
        return self.patch_size * self.patch_size

    @property
    def num_patches(self) -> int:
        return self.patch_grid * self.patch_grid

    @property
    def feature_dim(self) -> int:
        return int(self.proj.shape[1])

    @property
    def side(self) -> int:
        return self.patch_grid * self.patch_size

    def patches(self, frame: Tensor) -> Tensor:
        """Flatten a frame into (p, patch_dim) rows, patch and pixel order row-major."""
        check_rank("encode_frame", frame, 2)
        side = frame.shape[0]
        if frame.shape[1] != side or side % self.patch_grid:
            raise ShapeError("encode_frame", f"square side divisible by {self.patch_grid}", frame.shape)
        if side != self.side:
            raise ShapeError("encode_frame", (self.side, self.side), frame.shape)
        g, s = self.patch_grid, self.patch_size
        return frame.reshape(g, s, g, s).transpose(0, 2, 1, 3).reshape(g * g, s * s)

    def to_records(self) -> Dict[str, Tensor]:
        meta = np.array([self.patch_grid, self.patch_size], dtype=np.float32)
        return {"encoder/proj": self.proj, "encoder/meta": meta}

    @classmethod
    def from_records(cls, records: Mapping[str, Tensor], source: str = "<archive>") -> "EncoderStub":
        meta = require(records, "encoder/meta", source)
        proj = np.array(require(records, "encoder/proj", source), dtype=np.float32)
        return cls(patch_grid=int(meta[0]), patch_size=int(meta[1]), proj=proj)


def encode_frame(
    frame: Tensor,
    enc: EncoderStub,
    frame_index: int = 0,
    timestamp_s: float = 0.0,
) -> FrameFeatures:
    """Encode one frame into (p, d) patch features.

    Raises:
        ShapeError: If the frame side is not divisible by the patch grid
    """
    rows = enc.patches(np.asarray(frame, dtype=np.float64))
    z = (rows @ enc.proj.astype(np.float64)).astype(np.float32)
    return FrameFeatures(z=z, frame_index=frame_index, timestamp_s=timestamp_s)


def encode_video(video: RawVideo, enc: EncoderStub, indices: Sequence[int]) -> List[FrameFeatures]:
    """Encode the selected frames of a video, stamping source index and time."""
    return [
        encode_frame(video.frames[i], enc, frame_index=int(i), timestamp_s=i / video.native_fps)
        for i in indices
    ]
