"""
Aligner forward and backward passes.

A window of ``w`` frames is concatenated along the feature dimension, mapped by
``Q(GELU(P(.)))`` to ``h`` channels per patch, and spatially max-pooled 2x2
either after (post) or before (pre) the MLP.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hfr_aligner.aligner.params import HfrAlignerParams, PoolingMode, SingleFrameAlignerParams
from hfr_aligner.exceptions import ShapeError
from hfr_aligner.features.frames import FrameFeatures, WindowBatch
from hfr_aligner.features.windows import partition_windows
from hfr_aligner.numerics.ops import (
    concat_feature_dim,
    gelu,
    gelu_backward,
    linear,
    linear_backward,
    pool_rows,
    pool_rows_backward,
    pooled_count,
)
from hfr_aligner.numerics.tensor import Tensor, check_rank

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VisualTokens:
    """Pooled aligner output for one window.

    ``pre_pool`` is the MLP output before spatial pooling (post mode) or the
    MLP output on already-pooled features (pre mode, equal to ``tokens``).
    """

    tokens: Tensor  # (m, h)
    window_index: int
    pre_pool: Tensor

    @property
    def count(self) -> int:
        return int(self.tokens.shape[0])


@dataclass(frozen=True)
class WindowCache:
    """Intermediates kept for the backward pass of one window."""

    frames_in: Tuple[Tensor, ...]
    zcat: Tensor
    pre_act: Tensor
    hidden: Tensor
    out: Tensor


@dataclass
class AlignerGrads:
    """Gradients of the aligner parameters, named like the parameters."""

    W_P: Tensor
    b_P: Tensor
    W_Q: Tensor
    b_Q: Tensor

    @classmethod
    def zeros_like(cls, params: HfrAlignerParams) -> "AlignerGrads":
        return cls(**{k: np.zeros_like(v) for k, v in params.tensors().items()})

    def as_dict(self) -> Dict[str, Tensor]:
        return {"W_P": self.W_P, "b_P": self.b_P, "W_Q": self.W_Q, "b_Q": self.b_Q}

    def add_(self, other: "AlignerGrads") -> None:
        for name, grad in other.as_dict().items():
            getattr(self, name)[...] += grad


# -- single-frame aligner ---------------------------------------------------


def single_frame_forward(z: Tensor, params: SingleFrameAlignerParams) -> Tensor:
    """``B(GELU(A(z)))`` applied row-wise to (p, d) features."""
    return linear(gelu(linear(z, params.W_A, params.b_A)), params.W_B, params.b_B)


def single_frame_backward(
    grad_out: Tensor, z: Tensor, params: SingleFrameAlignerParams
) -> Tuple[Tensor, SingleFrameAlignerParams]:
    """Gradients of :func:`single_frame_forward`.

    Returns:
        (gradient w.r.t. z, parameter gradients packed in a SingleFrameAlignerParams)
    """
    pre = linear(z, params.W_A, params.b_A)
    hidden = gelu(pre)
    dhidden, dW_B, db_B = linear_backward(grad_out, hidden, params.W_B)
    dpre = gelu_backward(dhidden, pre)
    dz, dW_A, db_A = linear_backward(dpre, z, params.W_A)
    return dz, SingleFrameAlignerParams(W_A=dW_A, b_A=db_A, W_B=dW_B, b_B=db_B)


# -- window aligner ----------------------------------------------------------


def _check_window(frames: Sequence[Tensor], params: HfrAlignerParams) -> None:
    if len(frames) != params.w:
        raise ShapeError("window_forward frame count", params.w, len(frames))
    for z in frames:
        check_rank("window_forward frame", z, 2)
        if z.shape[1] != params.d:
            raise ShapeError("window_forward feature width", params.d, z.shape[1])
    pooled_count(frames[0].shape[0])


def window_forward_cached(
    frames: Sequence[Tensor], params: HfrAlignerParams
) -> Tuple[Tensor, Tensor, WindowCache]:
    """Run one window and keep the intermediates.

    Args:
        frames: ``w`` feature matrices of shape (p, d)
        params: Aligner weights

    Returns:
        (tokens of shape (m, h), pre-pool output, cache for :func:`window_backward`)

    Raises:
        ShapeError: On a wrong frame count, feature width or non-square p
    """
    _check_window(frames, params)
    if params.pooling is PoolingMode.PRE:
        frames_in = tuple(pool_rows(z) for z in frames)
    else:
        frames_in = tuple(frames)

    zcat = concat_feature_dim(list(frames_in))
    pre_act = linear(zcat, params.W_P, params.b_P)
    hidden = gelu(pre_act)
    out = linear(hidden, params.W_Q, params.b_Q)

    tokens = pool_rows(out) if params.pooling is PoolingMode.POST else out
    cache = WindowCache(frames_in=frames_in, zcat=zcat, pre_act=pre_act, hidden=hidden, out=out)
    return tokens, out, cache


def window_backward(
    grad_tokens: Tensor,
    cache: WindowCache,
    params: HfrAlignerParams,
    frames: Optional[Sequence[Tensor]] = None,
) -> Tuple[AlignerGrads, Optional[List[Tensor]]]:
    """Backward pass of one window.

    Args:
        grad_tokens: Upstream gradient, shaped like the window's tokens
        cache: Intermediates from :func:`window_forward_cached`
        params: The weights used in the forward pass
        frames: Original (p, d) frames; pass them to also get frame gradients

    Returns:
        (parameter gradients, per-frame feature gradients or None)
    """
    if params.pooling is PoolingMode.POST:
        grad_out = pool_rows_backward(grad_tokens, cache.out)
    else:
        grad_out = grad_tokens

    dhidden, dW_Q, db_Q = linear_backward(grad_out, cache.hidden, params.W_Q)
    dpre = gelu_backward(dhidden, cache.pre_act)
    dzcat, dW_P, db_P = linear_backward(dpre, cache.zcat, params.W_P)
    grads = AlignerGrads(W_P=dW_P, b_P=db_P, W_Q=dW_Q, b_Q=db_Q)

    if frames is None:
        return grads, None
    d = params.d
    dframes = [dzcat[:, k * d : (k + 1) * d] for k in range(params.w)]
    if params.pooling is PoolingMode.PRE:
        dframes = [pool_rows_backward(g, z) for g, z in zip(dframes, frames)]
    return grads, [np.ascontiguousarray(g) for g in dframes]


def window_forward(win: WindowBatch, params: HfrAlignerParams) -> VisualTokens:
    """Visual tokens of one processing window."""
    tokens, pre_pool, _ = window_forward_cached([f.z for f in win.frames], params)
    return VisualTokens(tokens=tokens, window_index=win.window_index, pre_pool=pre_pool)


def forward_windows(
    windows: Sequence[WindowBatch], params: HfrAlignerParams, threads: int = 1
) -> List[VisualTokens]:
    """Run windows independently, optionally on a thread pool; output keeps window order."""
    if threads > 1 and len(windows) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda win: window_forward(win, params), windows))
    return [window_forward(win, params) for win in windows]


def video_forward(
    seq: Sequence[FrameFeatures], params: HfrAlignerParams, threads: int = 1
) -> List[VisualTokens]:
    """Visual token sequence of a whole video, one entry per window.

    Raises:
        ShapeError: If the sequence is empty or shapes disagree
    """
    windows = partition_windows(seq, params.w)
    logger.debug(f"video_forward: {len(seq)} frames -> {len(windows)} windows of {params.w}")
    return forward_windows(windows, params, threads)


def flatten_tokens(outputs: Sequence[VisualTokens]) -> Tensor:
    """Stack every window's tokens into one (total_tokens, h) matrix."""
    return np.concatenate([o.tokens for o in outputs], axis=0)
