"""
Aligner Package

The high-frame-rate aligner and its block-matrix initialization from a single-frame aligner.
"""

from .model import (
    AlignerGrads,
    VisualTokens,
    flatten_tokens,
    single_frame_forward,
    video_forward,
    window_backward,
    window_forward,
    window_forward_cached,
)
from .params import HfrAlignerParams, PoolingMode, SingleFrameAlignerParams, init_from_single_frame

__all__ = [
    "AlignerGrads",
    "HfrAlignerParams",
    "PoolingMode",
    "SingleFrameAlignerParams",
    "VisualTokens",
    "flatten_tokens",
    "init_from_single_frame",
    "single_frame_forward",
    "video_forward",
    "window_backward",
    "window_forward",
    "window_forward_cached",
]
