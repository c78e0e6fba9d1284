"""
Visual token accounting.
"""

from typing import Tuple

from hfr_aligner.exceptions import ConfigError
from hfr_aligner.features.windows import num_windows
from hfr_aligner.numerics.ops import pooled_count


def token_budget(n_frames: int, w: int, p: int) -> Tuple[int, int, int]:
    """Windows, tokens per window and total tokens for a sampled video.

    >>> token_budget(1760, 16, 729)
    (110, 169, 18590)
    >>> token_budget(17, 16, 729)
    (2, 169, 338)

    Raises:
        ConfigError: If an argument is not positive
        ShapeError: If ``p`` is not a perfect square
    """
    for name, value in (("n_frames", n_frames), ("w", w), ("p", p)):
        if value < 1:
            raise ConfigError(name, value, "must be positive")
    windows = num_windows(n_frames, w)
    per_window = pooled_count(p)
    return windows, per_window, windows * per_window
