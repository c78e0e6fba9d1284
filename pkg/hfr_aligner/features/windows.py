"""
Window partitioning of frame-feature sequences.
"""

import logging
from typing import List, Sequence

from hfr_aligner.exceptions import ConfigError, ShapeError
from hfr_aligner.features.frames import FrameFeatures, WindowBatch

logger = logging.getLogger(__name__)


def num_windows(n_frames: int, w: int) -> int:
    return -(-n_frames // w)


def partition_windows(seq: Sequence[FrameFeatures], w: int) -> List[WindowBatch]:
    """Split a sequence into consecutive, non-overlapping windows of ``w`` frames.

    A short final window is filled by repeating its last frame.

    Raises:
        ShapeError: If the sequence is empty
        ConfigError: If ``w`` is below 1
    """
    if not seq:
        raise ShapeError("partition_windows", "non-empty sequence", 0)
    if w < 1:
        raise ConfigError("w", w, "must be at least 1")

    windows = []
    for j in range(num_windows(len(seq), w)):
        frames = list(seq[j * w : (j + 1) * w])
        padding = w - len(frames)
        if padding:
            logger.debug(f"Window {j}: padding {padding} frames with frame {frames[-1].frame_index}")
            frames.extend([frames[-1]] * padding)
        windows.append(WindowBatch(frames=tuple(frames), window_index=j, padding=padding))
    return windows


def unpad(windows: Sequence[WindowBatch]) -> List[FrameFeatures]:
    """Flatten windows back into the original sequence, dropping padding frames."""
    return [frame for win in windows for frame in win.real_frames()]
