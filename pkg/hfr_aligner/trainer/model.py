"""
Toy video classifier: frozen encoder, trainable aligner and a linear head.

Window tokens are mean-pooled over windows, flattened and fed to the head.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from hfr_aligner.aligner.model import AlignerGrads, video_forward, window_backward, window_forward_cached
from hfr_aligner.aligner.params import (
    HfrAlignerParams,
    PoolingMode,
    SingleFrameAlignerParams,
    init_from_single_frame,
)
from hfr_aligner.decoding import DecodeConfig, decode, resample_features
from hfr_aligner.exceptions import ConfigError, FormatError
from hfr_aligner.features.encoder import EncoderStub, encode_video
from hfr_aligner.features.frames import FrameFeatures, RawVideo
from hfr_aligner.features.sampling import sample_frame_indices
from hfr_aligner.features.windows import partition_windows
from hfr_aligner.numerics.archive import require
from hfr_aligner.numerics.ops import pooled_count
from hfr_aligner.numerics.tensor import GradPair, Tensor, all_finite

logger = logging.getLogger(__name__)


@dataclass
class ToyModel:
    """Encoder, aligner and classification head.

    The encoder is never updated; training changes the aligner and head only.
    """

    encoder: EncoderStub
    aligner: HfrAlignerParams
    head_W: Tensor  # (m*h, C)
    head_b: Tensor  # (C,)

    @property
    def num_classes(self) -> int:
        return int(self.head_b.shape[0])

    @property
    def fps(self) -> int:
        """Training frame rate; windows span one second."""
        return self.aligner.w

    @classmethod
    def create(
        cls,
        seed: int,
        fps: int,
        side: int = 32,
        patch_grid: int = 4,
        feature_dim: int = 24,
        hidden_dim: int = 32,
        num_classes: int = 2,
        noise_scale: float = 1.0,
        pooling: PoolingMode = PoolingMode.POST,
    ) -> "ToyModel":
        """Seeded model with a zero head, so every class starts equally likely.

        The encoder and single-frame base depend only on ``seed``, so models
        built for different frame rates share them.
        """
        if num_classes < 2:
            raise ConfigError("num_classes", num_classes, "must be at least 2")
        encoder = EncoderStub.from_seed(seed, side=side, patch_grid=patch_grid, feature_dim=feature_dim)
        base = SingleFrameAlignerParams.random(feature_dim, hidden_dim, seed + 1)
        aligner = init_from_single_frame(base, fps, noise_scale=noise_scale, seed=seed + 2, pooling=pooling)
        width = pooled_count(encoder.num_patches) * hidden_dim
        return cls(
            encoder=encoder,
            aligner=aligner,
            head_W=np.zeros((width, num_classes), dtype=np.float32),
            head_b=np.zeros(num_classes, dtype=np.float32),
        )

    def is_finite(self) -> bool:
        return self.aligner.is_finite() and all_finite(self.head_W) and all_finite(self.head_b)

    def to_records(self) -> Dict[str, Tensor]:
        records = self.encoder.to_records()
        records.update(self.aligner.to_records(self.encoder.num_patches))
        records["head/W"] = self.head_W
        records["head/b"] = self.head_b
        records["head/meta"] = np.array([self.num_classes], dtype=np.float32)
        return records

    @classmethod
    def from_records(cls, records: Mapping[str, Tensor], source: str = "<archive>") -> "ToyModel":
        encoder = EncoderStub.from_records(records, source)
        aligner = HfrAlignerParams.from_records(records, source)
        head_W = np.array(require(records, "head/W", source))
        head_b = np.array(require(records, "head/b", source))
        classes = int(require(records, "head/meta", source)[0])
        width = pooled_count(encoder.num_patches) * aligner.h
        if head_W.shape != (width, classes) or head_b.shape != (classes,):
            raise FormatError(source, f"head shapes {head_W.shape}, {head_b.shape} do not fit width {width}")
        return cls(encoder=encoder, aligner=aligner, head_W=head_W, head_b=head_b)


@dataclass
class ModelGrads:
    aligner: AlignerGrads
    head_W: Tensor
    head_b: Tensor

    @classmethod
    def zeros_like(cls, model: ToyModel) -> "ModelGrads":
        return cls(
            aligner=AlignerGrads.zeros_like(model.aligner),
            head_W=np.zeros_like(model.head_W),
            head_b=np.zeros_like(model.head_b),
        )

    def add_(self, other: "ModelGrads") -> None:
        self.aligner.add_(other.aligner)
        self.head_W += other.head_W
        self.head_b += other.head_b

    def scale_(self, factor: float) -> None:
        for grad in (*self.aligner.as_dict().values(), self.head_W, self.head_b):
            grad *= grad.dtype.type(factor)

    def pairs(self, model: ToyModel) -> List[GradPair]:
        """Trainable tensors of ``model`` matched with these gradients."""
        values = model.aligner.tensors()
        pairs = [GradPair(values[name], grad) for name, grad in self.aligner.as_dict().items()]
        return [*pairs, GradPair(model.head_W, self.head_W), GradPair(model.head_b, self.head_b)]


def video_features(model: ToyModel, video: RawVideo, fps: int) -> List[FrameFeatures]:
    """Encode ``video`` sampled at ``fps``."""
    indices = sample_frame_indices(len(video), video.native_fps, fps)
    return encode_video(video, model.encoder, indices)


def _log_softmax(logits: Tensor) -> Tensor:
    shifted = logits - np.max(logits)
    return shifted - np.log(np.sum(np.exp(shifted)))


def _head(model: ToyModel, pooled: Tensor) -> Tensor:
    return pooled.reshape(-1) @ model.head_W + model.head_b


def features_logits(
    model: ToyModel,
    seq: Sequence[FrameFeatures],
    decode_cfg: Optional[DecodeConfig] = None,
) -> Tensor:
    """Class logits for an encoded sequence.

    Without ``decode_cfg`` the sequence must be sampled at the training rate.
    With it, the sequence is taken at ``decode_cfg.test_fps`` and decoded by
    repetition or trimming.
    """
    if decode_cfg is None:
        outputs = video_forward(seq, model.aligner)
    else:
        outputs = decode(seq, model.aligner, decode_cfg)
    pooled = np.mean(np.stack([o.tokens for o in outputs]), axis=0)
    return _head(model, pooled)


def predict_logits(
    model: ToyModel,
    video: RawVideo,
    fps: int,
    decode_cfg: Optional[DecodeConfig] = None,
) -> Tensor:
    """Class logits for a raw video sampled at ``fps``."""
    if decode_cfg is not None:
        full = video_features(model, video, decode_cfg.train_fps)
        return features_logits(model, resample_features(full, decode_cfg.train_fps, decode_cfg.test_fps), decode_cfg)
    if fps != model.fps:
        raise ConfigError("fps", fps, f"model was trained at {model.fps} FPS; pass a decode config")
    return features_logits(model, video_features(model, video, fps))


def features_loss_and_grads(
    model: ToyModel, seq: Sequence[FrameFeatures], label: int
) -> Tuple[float, Tensor, ModelGrads]:
    """Cross-entropy loss, logits and parameter gradients for one sequence.

    Raises:
        ConfigError: If ``label`` is not a valid class index
    """
    if not 0 <= label < model.num_classes:
        raise ConfigError("label", label, f"must be in [0, {model.num_classes})")

    params = model.aligner
    windows = partition_windows(seq, params.w)
    caches = []
    tokens = []
    for win in windows:
        t, _, cache = window_forward_cached([f.z for f in win.frames], params)
        tokens.append(t)
        caches.append(cache)
    pooled = np.mean(np.stack(tokens), axis=0)
    logits = _head(model, pooled)
    log_probs = _log_softmax(logits.astype(np.float64))
    loss = float(-log_probs[label])

    dlogits = np.exp(log_probs)
    dlogits[label] -= 1.0
    dlogits = dlogits.astype(model.head_W.dtype)
    flat = pooled.reshape(-1)
    dhead_W = np.outer(flat, dlogits)
    dpooled = (model.head_W @ dlogits).reshape(pooled.shape)
    dtokens = dpooled / dpooled.dtype.type(len(windows))

    grads = AlignerGrads.zeros_like(params)
    for cache in caches:
        window_grads, _ = window_backward(dtokens, cache, params)
        grads.add_(window_grads)
    return loss, logits, ModelGrads(aligner=grads, head_W=dhead_W, head_b=dlogits)


def forward_loss(model: ToyModel, video: RawVideo, label: int, fps: int) -> Tuple[float, Tensor]:
    """Cross-entropy loss and logits for one labelled video sampled at ``fps``."""
    if fps != model.fps:
        raise ConfigError("fps", fps, f"must equal the model training rate {model.fps}")
    loss, logits, _ = features_loss_and_grads(model, video_features(model, video, fps), label)
    return loss, logits
