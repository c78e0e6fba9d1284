"""
Features Package

Frame sampling, synthetic motion videos, the frozen encoder stub, windowing and feature files.
"""

from .encoder import EncoderStub, encode_frame, encode_video
from .frames import FrameFeatures, RawVideo, WindowBatch
from .io import read_features, write_features
from .sampling import sample_frame_indices
from .synthetic import CCW, CW, apparent_angular_steps, generate_rotating_dot
from .windows import partition_windows

__all__ = [
    "CCW",
    "CW",
    "EncoderStub",
    "FrameFeatures",
    "RawVideo",
    "WindowBatch",
    "apparent_angular_steps",
    "encode_frame",
    "encode_video",
    "generate_rotating_dot",
    "partition_windows",
    "read_features",
    "sample_frame_indices",
    "write_features",
]
