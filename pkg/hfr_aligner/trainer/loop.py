"""
SGD training loop and evaluation for the toy classifier.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hfr_aligner.decoding import DecodeConfig
from hfr_aligner.exceptions import ConfigError, TrainingError
from hfr_aligner.features.frames import FrameFeatures
from hfr_aligner.trainer.dataset import MotionDataset
from hfr_aligner.trainer.model import (
    ModelGrads,
    ToyModel,
    features_loss_and_grads,
    predict_logits,
    video_features,
)

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """Optimizer settings.

    Attributes:
        learning_rate: Plain SGD step size
        epochs: Passes over the training split
        batch_size: Items per update; gradients are averaged
        seed: Seed for the shuffling order
        fps: Sampling rate; the aligner window spans ``fps`` frames
    """

    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default=2e-3, gt=0)
    epochs: int = Field(default=30, ge=0)
    batch_size: int = Field(default=1, ge=1)
    seed: int = 0
    fps: int = Field(default=16, ge=1)


@dataclass
class TrainReport:
    """Per-epoch mean training loss and final test accuracy."""

    fps: int
    epoch_losses: List[float] = field(default_factory=list)
    test_accuracy: Optional[float] = None

    def to_text(self) -> str:
        lines = [f"epoch {k} loss {loss:.6f}" for k, loss in enumerate(self.epoch_losses, start=1)]
        accuracy = "n/a" if self.test_accuracy is None else f"{self.test_accuracy:.4f}"
        lines.append(f"test_accuracy {accuracy}")
        return "\n".join(lines) + "\n"


def _sgd_step(model: ToyModel, grads: ModelGrads, lr: float) -> None:
    for pair in grads.pairs(model):
        pair.descend(lr)


def train(model: ToyModel, dataset: MotionDataset, cfg: TrainConfig) -> TrainReport:
    """Train the aligner and head in place with mini-batch SGD.

    Features are encoded once per item since the encoder is frozen. Gradients
    within a batch are summed in a fixed order, so a run is reproducible from
    its seeds.

    Args:
        model: Model whose aligner width equals ``cfg.fps``
        dataset: Source of training and test items
        cfg: Optimizer settings

    Returns:
        TrainReport with one loss per epoch and the test accuracy

    Raises:
        ConfigError: If the training split is empty or the model does not match ``cfg.fps``
        TrainingError: If a loss or a parameter becomes non-finite
    """
    if not dataset.train:
        raise ConfigError("dataset", "train", "training split is empty")
    if model.fps != cfg.fps:
        raise ConfigError("fps", cfg.fps, f"model aligner expects {model.fps} frames per window")
    if model.num_classes != dataset.num_classes:
        raise ConfigError("num_classes", model.num_classes, f"dataset has {dataset.num_classes} classes")

    features: List[List[FrameFeatures]] = [video_features(model, item.video, cfg.fps) for item in dataset.train]
    labels = [item.label for item in dataset.train]
    rng = np.random.default_rng(cfg.seed)
    report = TrainReport(fps=cfg.fps)

    step = 0
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(features))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            grads = ModelGrads.zeros_like(model)
            for i in batch:
                loss, _, item_grads = features_loss_and_grads(model, features[i], labels[i])
                if not np.isfinite(loss):
                    raise TrainingError(step, loss)
                total += loss
                grads.add_(item_grads)
            grads.scale_(1.0 / len(batch))
            _sgd_step(model, grads, cfg.learning_rate)
            if not model.is_finite():
                raise TrainingError(step, loss)
            step += 1
        report.epoch_losses.append(total / len(features))
        logger.info(f"[{cfg.fps} FPS] epoch {epoch}/{cfg.epochs} loss {report.epoch_losses[-1]:.6f}")

    if dataset.test:
        report.test_accuracy = evaluate(model, dataset, cfg.fps)
        logger.info(f"[{cfg.fps} FPS] test accuracy {report.test_accuracy:.4f}")
    return report


def evaluate(
    model: ToyModel,
    dataset: MotionDataset,
    fps: int,
    decode_cfg: Optional[DecodeConfig] = None,
) -> float:
    """Fraction of test items whose arg-max logit is the true label.

    Ties go to the lower class index.

    Raises:
        ConfigError: If the test split is empty
    """
    if not dataset.test:
        raise ConfigError("dataset", "test", "test split is empty")
    correct = 0
    for item in dataset.test:
        logits = predict_logits(model, item.video, fps, decode_cfg)
        correct += int(np.argmax(logits)) == item.label
    return correct / len(dataset.test)


def confusion_counts(
    model: ToyModel,
    dataset: MotionDataset,
    fps: int,
    decode_cfg: Optional[DecodeConfig] = None,
) -> Dict[str, int]:
    """Counts of (true, predicted) class-name pairs on the test split."""
    counts: Dict[str, int] = {f"{t}->{p}": 0 for t in dataset.classes for p in dataset.classes}
    for item in dataset.test:
        predicted = int(np.argmax(predict_logits(model, item.video, fps, decode_cfg)))
        counts[f"{dataset.classes[item.label]}->{dataset.classes[predicted]}"] += 1
    return counts
