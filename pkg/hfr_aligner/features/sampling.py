"""
Frame sampling policy.

Videos are sampled at the target rate; when that would exceed the frame cap,
exactly ``cap`` frames are taken uniformly over the whole video instead.
"""

import logging
import math
from typing import List

from hfr_aligner.exceptions import ConfigError, UnsupportedRateError

logger = logging.getLogger(__name__)

DEFAULT_FRAME_CAP = 16 * 110


def sampled_frame_count(total_frames: int, native_fps: int, target_fps: int) -> int:
    """Frames produced by stride sampling, ``ceil(total * target / native)``."""
    return -(-total_frames * target_fps // native_fps)


def sample_frame_indices(
    total_frames: int,
    native_fps: int,
    target_fps: int,
    cap: int = DEFAULT_FRAME_CAP,
) -> List[int]:
    """Choose source frame indices for a video.

    Args:
        total_frames: Number of frames in the source video
        native_fps: Source frame rate
        target_fps: Desired sampling rate
        cap: Maximum number of frames to return

    Returns:
        Non-decreasing list of indices in ``[0, total_frames - 1]``

    Raises:
        ConfigError: If an argument is not positive
        UnsupportedRateError: If ``target_fps`` exceeds ``native_fps``
    """
    for name, value in (
        ("total_frames", total_frames),
        ("native_fps", native_fps),
        ("target_fps", target_fps),
        ("cap", cap),
    ):
        if value < 1:
            raise ConfigError(name, value, "must be positive")
    if target_fps > native_fps:
        raise UnsupportedRateError(target_fps, native_fps)

    count = sampled_frame_count(total_frames, native_fps, target_fps)
    if count <= cap:
        ratio = native_fps / target_fps
        last = total_frames - 1
        return [min(int(math.floor(i * ratio + 0.5)), last) for i in range(count)]

    logger.debug(f"{count} frames at {target_fps} FPS exceed cap {cap}; sampling uniformly")
    return [(i * total_frames) // cap for i in range(cap)]
