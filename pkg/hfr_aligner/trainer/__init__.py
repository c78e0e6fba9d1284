"""
Trainer Package

Rotating-dot dataset, toy classifier and SGD loop.
"""

from .dataset import MotionDataset, MotionItem, check_aliasing, make_motion_dataset
from .loop import TrainConfig, TrainReport, confusion_counts, evaluate, train
from .model import ModelGrads, ToyModel, features_logits, features_loss_and_grads, forward_loss, predict_logits

__all__ = [
    "ModelGrads",
    "MotionDataset",
    "MotionItem",
    "ToyModel",
    "TrainConfig",
    "TrainReport",
    "check_aliasing",
    "confusion_counts",
    "evaluate",
    "features_logits",
    "features_loss_and_grads",
    "forward_loss",
    "make_motion_dataset",
    "predict_logits",
    "train",
]
