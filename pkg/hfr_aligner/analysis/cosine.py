"""
Frame-to-frame cosine similarity of encoder features before and after 2x2 max pooling.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from hfr_aligner.exceptions import ConfigError, ShapeError
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.numerics.ops import pool_rows
from hfr_aligner.numerics.tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CosineRow:
    frame_index: int
    d_before: float
    d_after: float


@dataclass
class CosineReport:
    """Mean per-position cosine similarity of each frame against a reference frame.

    ``skipped`` lists ``(frame_index, stage, position)`` for positions left out
    because one of the two vectors had zero norm.
    """

    reference_index: int
    rows: List[CosineRow] = field(default_factory=list)
    skipped: List[Tuple[int, str, int]] = field(default_factory=list)


def _mean_cosine(a: Tensor, b: Tensor) -> Tuple[float, List[int]]:
    a64 = a.astype(np.float64)
    b64 = b.astype(np.float64)
    # sqrt(x * x) rounds back to x, so identical vectors give exactly 1.0
    norms = np.sqrt(np.sum(a64 * a64, axis=1) * np.sum(b64 * b64, axis=1))
    valid = norms > 0
    skipped = [int(i) for i in np.flatnonzero(~valid)]
    if not valid.any():
        return float("nan"), skipped
    cos = np.sum(a64[valid] * b64[valid], axis=1) / norms[valid]
    return float(np.clip(np.mean(cos), -1.0, 1.0)), skipped


def cosine_report(seq: Sequence[FrameFeatures], reference: int) -> CosineReport:
    """Compare every frame with ``seq[reference]`` position by position.

    Args:
        seq: Encoded frames with a perfect-square patch count
        reference: Position of the reference frame within ``seq``

    Returns:
        CosineReport with one row per frame, in sequence order

    Raises:
        ConfigError: If ``reference`` is out of range
        ShapeError: If frames disagree in shape
    """
    if not 0 <= reference < len(seq):
        raise ConfigError("reference", reference, f"must be in [0, {len(seq)})")
    ref = seq[reference].z
    ref_pooled = pool_rows(ref)
    report = CosineReport(reference_index=seq[reference].frame_index)

    for frame in seq:
        if frame.z.shape != ref.shape:
            raise ShapeError("cosine_report frame", ref.shape, frame.z.shape)
        d_before, skipped_before = _mean_cosine(frame.z, ref)
        d_after, skipped_after = _mean_cosine(pool_rows(frame.z), ref_pooled)
        report.rows.append(CosineRow(frame_index=frame.frame_index, d_before=d_before, d_after=d_after))
        report.skipped.extend((frame.frame_index, "before", i) for i in skipped_before)
        report.skipped.extend((frame.frame_index, "after", i) for i in skipped_after)

    if report.skipped:
        logger.warning(f"cosine_report skipped {len(report.skipped)} zero-norm positions")
    return report
