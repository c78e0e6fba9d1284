"""
Rotating-dot motion dataset for the frame-rate separation experiment.

Each item is a dot orbiting clockwise or counter-clockwise. Speeds are chosen so
that 16 FPS sampling sees the true direction while 1 FPS sampling aliases.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.frames import RawVideo
from hfr_aligner.features.synthetic import CCW, CW, generate_rotating_dot

logger = logging.getLogger(__name__)

CLASS_NAMES: Tuple[str, str] = ("cw", "ccw")
DIRECTIONS: Tuple[int, int] = (CW, CCW)

TRAIN_SPLIT = 0
TEST_SPLIT = 1


@dataclass(frozen=True)
class MotionItem:
    """One labelled video.

    Attributes:
        video: The rendered frames
        label: Class index, 0 for clockwise and 1 for counter-clockwise
        speed: Revolutions per second
        seed: Seed the starting phase was drawn from
    """

    video: RawVideo
    label: int
    speed: float
    seed: int

    @property
    def direction(self) -> int:
        return DIRECTIONS[self.label]


@dataclass
class MotionDataset:
    """Train and test splits of motion items."""

    train: List[MotionItem]
    test: List[MotionItem]
    speeds: Tuple[float, ...]
    classes: Tuple[str, ...] = field(default=CLASS_NAMES)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def native_fps(self) -> int:
        items = self.train or self.test
        return items[0].video.native_fps if items else 0


def _apparent_fraction(speed: float, fps: int) -> float:
    """Per-sample rotation in revolutions, folded into [0, 1)."""
    return float(np.mod(speed / fps, 1.0))


def check_aliasing(speeds: Sequence[float], high_fps: int = 16, low_fps: int = 1) -> None:
    """Check that every speed is faithful at ``high_fps`` and some speed aliases at ``low_fps``.

    Raises:
        ConfigError: Naming the speed that breaks the condition
    """
    if not speeds:
        raise ConfigError("speeds", list(speeds), "at least one speed is required")
    for speed in speeds:
        if speed <= 0:
            raise ConfigError("speeds", speed, "speeds must be positive")
        if speed / high_fps >= 0.5:
            raise ConfigError("speeds", speed, f"aliases at {high_fps} FPS")
    if not any(_apparent_fraction(speed, low_fps) > 0.5 for speed in speeds):
        raise ConfigError("speeds", list(speeds), f"no speed aliases at {low_fps} FPS")


def item_seed(seed: int, split: int, index: int) -> int:
    """Seed for one item; train and test draw from disjoint streams."""
    return int(np.random.SeedSequence([seed, split, index]).generate_state(1)[0])


def _make_split(
    seed: int,
    split: int,
    count: int,
    speeds: Sequence[float],
    duration_s: float,
    native_fps: int,
    side: int,
) -> List[MotionItem]:
    items = []
    for i in range(count):
        label = i % 2
        speed = float(speeds[(i // 2) % len(speeds)])
        s = item_seed(seed, split, i)
        video = generate_rotating_dot(s, speed, DIRECTIONS[label], duration_s, native_fps, side)
        items.append(MotionItem(video=video, label=label, speed=speed, seed=s))
    return items


def make_motion_dataset(
    seed: int,
    n_train: int,
    n_test: int,
    speeds: Sequence[float] = (0.75,),
    duration_s: float = 2.0,
    native_fps: int = 16,
    side: int = 32,
) -> MotionDataset:
    """Build a balanced rotating-dot dataset.

    Items alternate clockwise and counter-clockwise and cycle through
    ``speeds``, so every speed contributes both classes equally when
    ``n`` is a multiple of ``2 * len(speeds)``.

    Args:
        seed: Dataset seed
        n_train: Number of training items
        n_test: Number of test items
        speeds: Revolutions per second
        duration_s: Clip length in seconds
        native_fps: Rendering frame rate
        side: Frame side in pixels

    Returns:
        MotionDataset with disjoint train and test seeds

    Raises:
        ConfigError: If a count is negative or the speeds break the aliasing condition
    """
    if n_train < 0:
        raise ConfigError("n_train", n_train, "must be non-negative")
    if n_test < 0:
        raise ConfigError("n_test", n_test, "must be non-negative")
    check_aliasing(speeds)

    train = _make_split(seed, TRAIN_SPLIT, n_train, speeds, duration_s, native_fps, side)
    test = _make_split(seed, TEST_SPLIT, n_test, speeds, duration_s, native_fps, side)
    logger.info(f"Built motion dataset: {n_train} train, {n_test} test, speeds={list(speeds)}")
    return MotionDataset(train=train, test=test, speeds=tuple(float(s) for s in speeds))
