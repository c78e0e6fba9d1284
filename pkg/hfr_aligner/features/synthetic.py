"""
Synthetic rotating-dot videos.

A single Gaussian dot orbits the frame center. Sampled too slowly, the rotation
aliases and appears to turn the other way, which makes frame rate matter for
recognizing the direction.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.frames import RawVideo
from hfr_aligner.numerics.tensor import Tensor

logger = logging.getLogger(__name__)

CW = -1
CCW = 1


def _dot_positions(
    phase: float, revolutions_per_s: float, direction: int, times: np.ndarray, side: int
) -> Tuple[np.ndarray, np.ndarray]:
    center = side / 2.0
    radius = side / 4.0
    theta = 2.0 * np.pi * (phase + direction * revolutions_per_s * times)
    # rows grow downward, so a positive angle is counter-clockwise on screen
    return center + radius * np.cos(theta), center - radius * np.sin(theta)


def generate_rotating_dot(
    seed: int,
    revolutions_per_s: float,
    direction: int,
    duration_s: float,
    native_fps: int,
    side: int = 32,
) -> RawVideo:
    """Render a dot orbiting the frame center.

    Args:
        seed: Seed for the starting phase
        revolutions_per_s: Angular speed in revolutions per second
        direction: +1 for counter-clockwise, -1 for clockwise
        duration_s: Video length in seconds
        native_fps: Frames per second
        side: Frame side in pixels (dot sigma is side/16, orbit radius side/4)

    Returns:
        RawVideo with ``round(native_fps * duration_s)`` frames

    Raises:
        ConfigError: If side or native_fps is below 16 or direction is not +/-1
    """
    if side < 16:
        raise ConfigError("side", side, "must be at least 16")
    if native_fps < 16:
        raise ConfigError("native_fps", native_fps, "must be at least 16")
    if direction not in (CW, CCW):
        raise ConfigError("direction", direction, "must be +1 (ccw) or -1 (cw)")

    phase = float(np.random.default_rng(seed).uniform(0.0, 1.0))
    n_frames = int(round(native_fps * duration_s))
    times = np.arange(n_frames, dtype=np.float64) / native_fps
    xs, ys = _dot_positions(phase, revolutions_per_s, direction, times, side)

    sigma = side / 16.0
    coords = np.arange(side, dtype=np.float64) + 0.5
    dx = coords[None, None, :] - xs[:, None, None]
    dy = coords[None, :, None] - ys[:, None, None]
    frames = np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))

    logger.debug(
        f"Rendered {n_frames} frames: rps={revolutions_per_s} dir={direction} phase={phase:.4f}"
    )
    return RawVideo(frames=frames.astype(np.float32), native_fps=native_fps, duration_s=duration_s)


def dot_centroid(frame: Tensor) -> Tuple[float, float]:
    """Intensity-weighted (x, y) centroid in pixel coordinates."""
    side = frame.shape[0]
    coords = np.arange(side, dtype=np.float64) + 0.5
    mass = float(frame.sum())
    x = float((frame.sum(axis=0) * coords).sum()) / mass
    y = float((frame.sum(axis=1) * coords).sum()) / mass
    return x, y


def apparent_angular_steps(video: RawVideo, indices: Sequence[int]) -> np.ndarray:
    """Wrapped per-sample angular steps (in revolutions) seen at the given frames.

    Positive steps read as counter-clockwise motion.
    """
    center = video.side / 2.0
    angles = []
    for i in indices:
        x, y = dot_centroid(video.frames[i])
        angles.append(np.arctan2(center - y, x - center))
    steps = np.diff(np.asarray(angles))
    wrapped = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return wrapped / (2.0 * np.pi)
