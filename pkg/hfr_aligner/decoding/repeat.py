"""
Repeat decoding: every test-time frame is repeated ``k`` times so a window of
``s = w / k`` frames fills the aligner's full input width.
"""

import logging
from typing import List, Sequence

from hfr_aligner.aligner.model import VisualTokens, forward_windows
from hfr_aligner.aligner.params import HfrAlignerParams
from hfr_aligner.decoding.config import DecodeConfig, DecodeMethod
from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.frames import FrameFeatures, WindowBatch
from hfr_aligner.features.sampling import sample_frame_indices
from hfr_aligner.features.windows import partition_windows

logger = logging.getLogger(__name__)


def repeat_expand(win: Sequence[FrameFeatures], k: int, w: int, window_index: int = 0) -> WindowBatch:
    """Repeat each of ``s`` frames ``k`` times, frame-major, into a ``w``-frame window.

    Raises:
        ConfigError: If ``s * k != w``
    """
    s = len(win)
    if k < 1 or s * k != w:
        raise ConfigError("k", k, f"{s} frames x k={k} must equal window width {w}")
    frames = tuple(frame for frame in win for _ in range(k))
    return WindowBatch(frames=frames, window_index=window_index)


def resample_features(seq: Sequence[FrameFeatures], source_fps: int, test_fps: int) -> List[FrameFeatures]:
    """Keep every ``source_fps / test_fps``-th frame of a full-rate sequence."""
    indices = sample_frame_indices(len(seq), source_fps, test_fps, cap=len(seq))
    return [seq[i] for i in indices]


def decode_repeat(
    seq: Sequence[FrameFeatures],
    params: HfrAlignerParams,
    cfg: DecodeConfig,
    threads: int = 1,
) -> List[VisualTokens]:
    """Decode a sequence sampled at ``cfg.test_fps`` with the full-width aligner.

    Raises:
        ConfigError: If the config does not describe repeat decoding for this aligner
    """
    if cfg.method is not DecodeMethod.REPEAT:
        raise ConfigError("method", cfg.method.value, "decode_repeat requires method 'repeat'")
    if cfg.train_fps != params.w:
        raise ConfigError("train_fps", cfg.train_fps, f"must equal the aligner window width {params.w}")

    s = cfg.test_fps
    windows = [
        repeat_expand(win.frames, cfg.k, params.w, window_index=win.window_index)
        for win in partition_windows(seq, s)
    ]
    logger.debug(f"decode_repeat: {len(seq)} frames, s={s}, k={cfg.k} -> {len(windows)} windows")
    return forward_windows(windows, params, threads)
