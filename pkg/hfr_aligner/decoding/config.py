"""
Variable-frame-rate decoding configuration.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DecodeMethod(str, Enum):
    """How a lower test frame rate is fed to an aligner trained at a higher one."""

    REPEAT = "repeat"
    TRIM = "trim"


class DecodeConfig(BaseModel):
    """Test-time frame-rate settings.

    Attributes:
        train_fps: Frames per window the aligner was trained with (w per second)
        test_fps: Frames per second available at test time (s per window)
        method: Repeat frames or trim the aligner weights
    """

    model_config = ConfigDict(frozen=True)

    train_fps: int = Field(default=16, ge=1)
    test_fps: int = Field(..., ge=1)
    method: DecodeMethod = DecodeMethod.REPEAT

    @model_validator(mode="after")
    def validate_divisor(self) -> "DecodeConfig":
        """Validate that the test rate divides the training rate.

        Raises:
            ValueError: If ``test_fps`` does not divide ``train_fps``
        """
        if self.test_fps > self.train_fps or self.train_fps % self.test_fps:
            raise ValueError(
                f"test_fps {self.test_fps} must divide train_fps {self.train_fps} (integer reduction factor)"
            )
        return self

    @property
    def k(self) -> int:
        """Frame-rate reduction factor."""
        return self.train_fps // self.test_fps
