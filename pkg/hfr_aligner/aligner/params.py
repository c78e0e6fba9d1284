"""
Aligner parameter containers and block-matrix initialization.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Mapping, Optional

import numpy as np

from hfr_aligner.exceptions import ConfigError, FormatError, ShapeError
from hfr_aligner.numerics.archive import require
from hfr_aligner.numerics.tensor import Precision, Tensor, all_finite, check_dims

logger = logging.getLogger(__name__)


class PoolingMode(str, Enum):
    """Where the 2x2 spatial max pool sits relative to the aligner."""

    POST = "post"
    PRE = "pre"

    @property
    def code(self) -> int:
        return 0 if self is PoolingMode.POST else 1

    @classmethod
    def from_code(cls, code: int) -> "PoolingMode":
        if code == 0:
            return cls.POST
        if code == 1:
            return cls.PRE
        raise FormatError("<aligner/meta>", f"unknown pooling code {code}")


def kaiming_uniform_bound(fan_in: int, scale: float = 1.0) -> float:
    """Kaiming uniform bound ``scale * sqrt(6 / fan_in)``."""
    return scale * float(np.sqrt(6.0 / fan_in))


@dataclass(frozen=True)
class SingleFrameAlignerParams:
    """Two-layer image aligner: ``B(GELU(A(z)))``."""

    W_A: Tensor  # (d, h)
    b_A: Tensor  # (h,)
    W_B: Tensor  # (h, h)
    b_B: Tensor  # (h,)

    def __post_init__(self) -> None:
        d, h = self.W_A.shape
        check_dims("SingleFrameAlignerParams.b_A", (h,), self.b_A.shape)
        check_dims("SingleFrameAlignerParams.W_B", (h, h), self.W_B.shape)
        check_dims("SingleFrameAlignerParams.b_B", (h,), self.b_B.shape)

    @property
    def d(self) -> int:
        return int(self.W_A.shape[0])

    @property
    def h(self) -> int:
        return int(self.W_A.shape[1])

    @classmethod
    def random(
        cls, d: int, h: int, seed: int, precision: Precision = Precision.FLOAT32
    ) -> "SingleFrameAlignerParams":
        """Seeded Kaiming-uniform weights with small uniform biases."""
        rng = np.random.default_rng(seed)
        bound_a = kaiming_uniform_bound(d)
        bound_b = kaiming_uniform_bound(h)
        dtype = precision.dtype
        return cls(
            W_A=rng.uniform(-bound_a, bound_a, (d, h)).astype(dtype),
            b_A=rng.uniform(-0.1, 0.1, h).astype(dtype),
            W_B=rng.uniform(-bound_b, bound_b, (h, h)).astype(dtype),
            b_B=rng.uniform(-0.1, 0.1, h).astype(dtype),
        )

    def astype(self, precision: Precision) -> "SingleFrameAlignerParams":
        dtype = precision.dtype
        return SingleFrameAlignerParams(*(t.astype(dtype) for t in (self.W_A, self.b_A, self.W_B, self.b_B)))

    def is_finite(self) -> bool:
        return all(all_finite(t) for t in (self.W_A, self.b_A, self.W_B, self.b_B))

    def to_records(self) -> Dict[str, Tensor]:
        return {"base/W_A": self.W_A, "base/b_A": self.b_A, "base/W_B": self.W_B, "base/b_B": self.b_B}

    @classmethod
    def from_records(cls, records: Mapping[str, Tensor], source: str = "<archive>") -> "SingleFrameAlignerParams":
        base = cls(*(np.array(require(records, f"base/{n}", source)) for n in ("W_A", "b_A", "W_B", "b_B")))
        if not base.is_finite():
            raise FormatError(source, "base weights hold non-finite values")
        return base


@dataclass(frozen=True)
class HfrAlignerParams:
    """High-frame-rate aligner over windows of ``w`` frames.

    ``W_P`` maps ``w*d`` to ``w*h`` and ``W_Q`` maps ``w*h`` to ``h``.
    """

    W_P: Tensor
    b_P: Tensor
    W_Q: Tensor
    b_Q: Tensor
    w: int
    pooling: PoolingMode = PoolingMode.POST

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ConfigError("w", self.w, "must be at least 1")
        wd, wh = self.W_P.shape
        if wd % self.w or wh % self.w:
            raise ShapeError("HfrAlignerParams.W_P", f"multiples of w={self.w}", self.W_P.shape)
        h = wh // self.w
        check_dims("HfrAlignerParams.b_P", (wh,), self.b_P.shape)
        check_dims("HfrAlignerParams.W_Q", (wh, h), self.W_Q.shape)
        check_dims("HfrAlignerParams.b_Q", (h,), self.b_Q.shape)

    @property
    def d(self) -> int:
        return int(self.W_P.shape[0]) // self.w

    @property
    def h(self) -> int:
        return int(self.W_Q.shape[1])

    @property
    def dtype(self) -> np.dtype:
        return self.W_P.dtype

    def tensors(self) -> Dict[str, Tensor]:
        return {"W_P": self.W_P, "b_P": self.b_P, "W_Q": self.W_Q, "b_Q": self.b_Q}

    def with_tensors(self, **tensors: Tensor) -> "HfrAlignerParams":
        return replace(self, **tensors)

    def astype(self, precision: Precision) -> "HfrAlignerParams":
        return self.with_tensors(**{k: v.astype(precision.dtype) for k, v in self.tensors().items()})

    def is_finite(self) -> bool:
        return all(all_finite(t) for t in self.tensors().values())

    def to_records(self, p: int, base: Optional[SingleFrameAlignerParams] = None) -> Dict[str, Tensor]:
        records: Dict[str, Tensor] = {f"aligner/{k}": v for k, v in self.tensors().items()}
        records["aligner/meta"] = np.array([self.w, self.d, self.h, p, self.pooling.code], dtype=np.float32)
        if base is not None:
            records.update(base.to_records())
        return records

    @classmethod
    def from_records(cls, records: Mapping[str, Tensor], source: str = "<archive>") -> "HfrAlignerParams":
        meta = require(records, "aligner/meta", source)
        if meta.shape != (5,):
            raise FormatError(source, f"aligner/meta must hold 5 values, got shape {meta.shape}")
        tensors = {k: np.array(require(records, f"aligner/{k}", source)) for k in ("W_P", "b_P", "W_Q", "b_Q")}
        params = cls(**tensors, w=int(meta[0]), pooling=PoolingMode.from_code(int(meta[4])))
        if (params.d, params.h) != (int(meta[1]), int(meta[2])):
            raise FormatError(source, f"aligner/meta dims {meta[1:3]} disagree with weights ({params.d}, {params.h})")
        if not params.is_finite():
            raise FormatError(source, "aligner weights hold non-finite values")
        return params


def patch_count_from_records(records: Mapping[str, Tensor], source: str = "<archive>") -> int:
    """Patch count ``p`` the stored aligner was built for."""
    return int(require(records, "aligner/meta", source)[3])


def init_from_single_frame(
    base: SingleFrameAlignerParams,
    w: int,
    noise_scale: float = 1.0,
    seed: int = 0,
    pooling: PoolingMode = PoolingMode.POST,
) -> HfrAlignerParams:
    """Build a window aligner whose initial output averages the single-frame aligner.

    ``W_P`` holds ``W_A`` on its ``w`` diagonal blocks and Kaiming-uniform noise
    (fan-in ``w*d``, scaled by ``noise_scale``) elsewhere; ``W_Q`` stacks ``W_B / w``.

    Raises:
        ConfigError: If ``w`` < 1 or ``noise_scale`` < 0
    """
    if w < 1:
        raise ConfigError("w", w, "must be at least 1")
    if noise_scale < 0:
        raise ConfigError("noise_scale", noise_scale, "must be non-negative")

    d, h = base.d, base.h
    dtype = base.W_A.dtype
    if noise_scale > 0:
        bound = kaiming_uniform_bound(w * d, noise_scale)
        W_P = np.random.default_rng(seed).uniform(-bound, bound, (w * d, w * h)).astype(dtype)
    else:
        W_P = np.zeros((w * d, w * h), dtype=dtype)
    for k in range(w):
        W_P[k * d : (k + 1) * d, k * h : (k + 1) * h] = base.W_A

    params = HfrAlignerParams(
        W_P=W_P,
        b_P=np.tile(base.b_A, w),
        W_Q=np.concatenate([base.W_B / dtype.type(w)] * w, axis=0).astype(dtype),
        b_Q=base.b_B.copy(),
        w=w,
        pooling=pooling,
    )
    logger.debug(f"Initialized aligner w={w} d={d} h={h} noise={noise_scale} pooling={pooling.value}")
    return params
