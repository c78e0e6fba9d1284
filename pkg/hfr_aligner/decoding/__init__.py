"""
Decoding Package

Variable-frame-rate decoding by frame repetition or aligner trimming.
"""

from typing import List, Sequence

from hfr_aligner.aligner.model import VisualTokens
from hfr_aligner.aligner.params import HfrAlignerParams
from hfr_aligner.exceptions import ConfigError

from .config import DecodeConfig, DecodeMethod
from .repeat import decode_repeat, repeat_expand, resample_features
from .trim import TrimmedAlignerParams, decode_trimmed, trim_aligner


def decode(seq: Sequence, params: HfrAlignerParams, cfg: DecodeConfig, threads: int = 1) -> List[VisualTokens]:
    """Dispatch to repeat or trimmed decoding according to ``cfg.method``."""
    if cfg.method is DecodeMethod.REPEAT:
        return decode_repeat(seq, params, cfg, threads)
    if cfg.train_fps != params.w:
        raise ConfigError("train_fps", cfg.train_fps, f"must equal the aligner window width {params.w}")
    return decode_trimmed(seq, trim_aligner(params, cfg.test_fps), threads)


__all__ = [
    "DecodeConfig",
    "DecodeMethod",
    "TrimmedAlignerParams",
    "decode",
    "decode_repeat",
    "decode_trimmed",
    "repeat_expand",
    "resample_features",
    "trim_aligner",
]
