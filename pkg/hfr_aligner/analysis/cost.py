"""
Analytical multiply-accumulate cost model for encoder, aligner and LLM.

The LLM term is a shape proxy: ``alpha * T^2 * width`` for attention scores
and ``beta * T * width^2`` for projections and MLPs, with ``T`` the sequence
length (visual plus output tokens).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hfr_aligner.aligner.params import PoolingMode
from hfr_aligner.decoding.config import DecodeMethod
from hfr_aligner.exceptions import ConfigError
from hfr_aligner.numerics.ops import pooled_count

logger = logging.getLogger(__name__)

# 28 layers, width 3584, MLP width 18944
LLM_7B_LAYERS = 28
LLM_7B_WIDTH = 3584
LLM_7B_MLP_WIDTH = 18944
LLM_7B_ALPHA = 2.0 * LLM_7B_LAYERS
LLM_7B_BETA = LLM_7B_LAYERS * (4.0 + 3.0 * LLM_7B_MLP_WIDTH / LLM_7B_WIDTH)

# ~428M encoder parameters applied to 729 patch tokens
SIGLIP_SO400M_MACS_PER_FRAME = 428e6 * 729


class CostConfig(BaseModel):
    """Dimensions and constants of the cost model.

    Defaults describe a 7B-class system at 16 FPS with a 729-patch encoder.
    Leave ``encoder_macs_per_frame`` unset to cost the linear encoder stub
    (``p * patch_dim * d`` per frame). ``frame_cap`` is off by default so
    encoder cost stays linear in ``fps``; set it to mirror the sampler cap.
    """

    model_config = ConfigDict(frozen=True)

    fps: int = Field(default=16, ge=1)
    duration_s: float = Field(default=60.0, gt=0)
    output_tokens: int = Field(default=32, ge=0)
    p: int = Field(default=729, ge=1)
    d: int = Field(default=1152, ge=1)
    h: int = Field(default=LLM_7B_WIDTH, ge=1)
    w: int = Field(default=16, ge=1)
    patch_dim: int = Field(default=14 * 14 * 3, ge=1)
    encoder_macs_per_frame: Optional[float] = Field(default=SIGLIP_SO400M_MACS_PER_FRAME, gt=0)
    frame_cap: Optional[int] = Field(default=None, ge=1)
    method: Optional[DecodeMethod] = None
    pooling: PoolingMode = PoolingMode.POST
    llm_width: int = Field(default=LLM_7B_WIDTH, ge=1)
    alpha: float = Field(default=LLM_7B_ALPHA, ge=0)
    beta: float = Field(default=LLM_7B_BETA, ge=0)

    @model_validator(mode="after")
    def validate_method(self) -> "CostConfig":
        if self.method is not None and (self.fps > self.w or self.w % self.fps):
            raise ValueError(f"fps {self.fps} must divide w {self.w} for {self.method.value} decoding")
        return self


@dataclass(frozen=True)
class CostReport:
    """MAC counts per component for one configuration."""

    config: CostConfig
    frames: int
    windows: int
    visual_tokens: int
    encoder: float
    aligner: float
    llm_proxy: float

    @property
    def total(self) -> float:
        return self.encoder + self.aligner + self.llm_proxy

    def shares(self) -> Dict[str, float]:
        total = self.total
        if total == 0:
            return {"encoder": 0.0, "aligner": 0.0, "llm_proxy": 0.0}
        return {
            "encoder": self.encoder / total,
            "aligner": self.aligner / total,
            "llm_proxy": self.llm_proxy / total,
        }


def _encoder_per_frame(cfg: CostConfig) -> float:
    if cfg.encoder_macs_per_frame is not None:
        return float(cfg.encoder_macs_per_frame)
    return float(cfg.p * cfg.patch_dim * cfg.d)


def cost_model(cfg: CostConfig) -> CostReport:
    """Evaluate the cost model.

    With ``method`` unset, frames are grouped in windows of ``w``. With repeat
    or trim decoding, each window covers one second (``fps`` frames); repeat
    feeds ``w``-wide windows, trim feeds ``fps``-wide ones.

    Raises:
        ShapeError: If ``p`` is not a perfect square
    """
    frames = math.ceil(cfg.duration_s * cfg.fps)
    if cfg.frame_cap is not None:
        frames = min(frames, cfg.frame_cap)

    if cfg.method is None:
        windows, width = math.ceil(frames / cfg.w), cfg.w
    elif cfg.method is DecodeMethod.REPEAT:
        windows, width = math.ceil(frames / cfg.fps), cfg.w
    else:
        windows, width = math.ceil(frames / cfg.fps), cfg.fps

    per_window_tokens = pooled_count(cfg.p)
    rows = per_window_tokens if cfg.pooling is PoolingMode.PRE else cfg.p
    aligner_per_window = rows * (width * cfg.d) * (width * cfg.h) + rows * (width * cfg.h) * cfg.h

    visual_tokens = windows * per_window_tokens
    seq_len = visual_tokens + cfg.output_tokens
    llm = cfg.alpha * seq_len**2 * cfg.llm_width + cfg.beta * seq_len * cfg.llm_width**2

    report = CostReport(
        config=cfg,
        frames=frames,
        windows=windows,
        visual_tokens=visual_tokens,
        encoder=frames * _encoder_per_frame(cfg),
        aligner=float(windows * aligner_per_window),
        llm_proxy=float(llm),
    )
    logger.debug(f"cost_model fps={cfg.fps}: frames={frames} windows={windows} tokens={visual_tokens}")
    return report


def cost_sweep(cfg: CostConfig, fps_values: Sequence[int]) -> List[CostReport]:
    """One report per test frame rate, all other settings fixed.

    Raises:
        ConfigError: If ``fps_values`` is empty
    """
    if not fps_values:
        raise ConfigError("fps_values", list(fps_values), "at least one frame rate is required")
    return [cost_model(CostConfig(**{**cfg.model_dump(), "fps": fps})) for fps in fps_values]


COST_PRESETS: Dict[str, CostConfig] = {
    "7b-proxy": CostConfig(),
    "desk": CostConfig(
        p=16,
        d=24,
        h=32,
        patch_dim=64,
        encoder_macs_per_frame=None,
        duration_s=2.0,
        llm_width=64,
        alpha=4.0,
        beta=12.0,
    ),
}
