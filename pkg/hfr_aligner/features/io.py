"""
Feature file IO.

A feature file is a named archive holding ``frame/<k>/z`` and
``frame/<k>/meta`` (``[frame_index, timestamp_s]``) for every frame ``k``.
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from hfr_aligner.exceptions import FormatError
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.numerics.archive import read_archive, require, write_archive
from hfr_aligner.numerics.tensor import Tensor

logger = logging.getLogger(__name__)

_FRAME_NAME = re.compile(r"^frame/(\d+)/z$")


def features_to_records(seq: Sequence[FrameFeatures]) -> Dict[str, Tensor]:
    records: Dict[str, Tensor] = {}
    for k, frame in enumerate(seq):
        records[f"frame/{k}/z"] = frame.z
        records[f"frame/{k}/meta"] = np.array([frame.frame_index, frame.timestamp_s], dtype=np.float32)
    return records


def features_from_records(records: Dict[str, Tensor], source: str) -> List[FrameFeatures]:
    keys = sorted(int(m.group(1)) for name in records if (m := _FRAME_NAME.match(name)))
    if keys != list(range(len(keys))):
        raise FormatError(source, "frame records are not numbered 0..n-1")
    seq = []
    for k in keys:
        meta = require(records, f"frame/{k}/meta", source)
        if meta.shape != (2,):
            raise FormatError(source, f"frame/{k}/meta must hold 2 values, got shape {meta.shape}")
        frame = FrameFeatures(
            z=np.array(records[f"frame/{k}/z"], dtype=np.float32),
            frame_index=int(meta[0]),
            timestamp_s=float(meta[1]),
        )
        if not frame.is_finite():
            raise FormatError(source, f"frame/{k}/z holds non-finite values")
        seq.append(frame)
    return seq


def write_features(path: Union[str, Path], seq: Sequence[FrameFeatures]) -> None:
    """Write a frame-feature sequence.

    Raises:
        FormatError: If the sequence is empty
    """
    if not seq:
        raise FormatError(str(path), "cannot write an empty feature sequence")
    write_archive(path, features_to_records(seq))
    logger.info(f"Wrote {len(seq)} frames to {path}")


def read_features(path: Union[str, Path]) -> List[FrameFeatures]:
    """Read a frame-feature sequence written by :func:`write_features`.

    Raises:
        FormatError: On malformed magic, version or missing records
        ArchiveIOError: On a truncated payload
    """
    seq = features_from_records(read_archive(path), str(path))
    if not seq:
        raise FormatError(str(path), "no frame records")
    return seq
