"""
Trimmed decoding: the aligner's leading submatrices serve windows of ``s`` frames.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from hfr_aligner.aligner.model import VisualTokens, forward_windows
from hfr_aligner.aligner.params import HfrAlignerParams, PoolingMode
from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.features.windows import partition_windows
from hfr_aligner.numerics.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrimmedAlignerParams:
    """Leading ``s``-frame slice of a window aligner."""

    W_P: Tensor  # (s*d, s*h)
    b_P: Tensor  # (s*h,)
    W_Q: Tensor  # (s*h, h)
    b_Q: Tensor  # (h,)
    s: int
    pooling: PoolingMode = PoolingMode.POST

    def as_window_params(self) -> HfrAlignerParams:
        """The same weights viewed as a window aligner with ``w = s``."""
        return HfrAlignerParams(W_P=self.W_P, b_P=self.b_P, W_Q=self.W_Q, b_Q=self.b_Q, w=self.s, pooling=self.pooling)


def trim_aligner(params: HfrAlignerParams, s: int) -> TrimmedAlignerParams:
    """Slice ``W_P[:s*d, :s*h]``, ``b_P[:s*h]``, ``W_Q[:s*h]`` and keep ``b_Q``.

    Raises:
        ConfigError: If ``s`` is outside ``[1, w]``
    """
    if not 1 <= s <= params.w:
        raise ConfigError("s", s, f"must be between 1 and w={params.w}")
    sd, sh = s * params.d, s * params.h
    trimmed = TrimmedAlignerParams(
        W_P=np.ascontiguousarray(params.W_P[:sd, :sh]),
        b_P=np.ascontiguousarray(params.b_P[:sh]),
        W_Q=np.ascontiguousarray(params.W_Q[:sh]),
        b_Q=params.b_Q.copy(),
        s=s,
        pooling=params.pooling,
    )
    # validates the slice shapes
    trimmed.as_window_params()
    return trimmed


def decode_trimmed(
    seq: Sequence[FrameFeatures], trimmed: TrimmedAlignerParams, threads: int = 1
) -> List[VisualTokens]:
    """Decode windows of ``s`` frames through the trimmed weights."""
    params = trimmed.as_window_params()
    windows = partition_windows(seq, trimmed.s)
    logger.debug(f"decode_trimmed: {len(seq)} frames, s={trimmed.s} -> {len(windows)} windows")
    return forward_windows(windows, params, threads)
