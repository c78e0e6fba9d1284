"""
Settings configuration for hfr-aligner.

This module provides configuration settings using Pydantic for validation.
"""

import logging
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """
    Application settings with validation.

    Attributes:
        app_name (str): The application name identifier.
        app_tagline (str): The application tagline/description.
        root_dir (Path): The root directory of the application.
        log_level (str): The logging level (e.g., ERROR, WARN, INFO, DEBUG).
        seed (int): Seed used when a command is not given ``--seed``.
        side (int): Pixels per side of synthetic frames.
        patch_grid (int): Patches per side of the encoder stub (p = patch_grid**2).
        feature_dim (int): Encoder output width d.
        hidden_dim (int): Aligner output width h.
        window (int): Frames per processing window w.
        train_fps (int): Frame rate the aligner window corresponds to.
        frame_cap (int): Maximum number of sampled frames per video.
        threads (int): Worker threads for window-parallel forward passes.
        noise_scale (float): Multiplier on the Kaiming bound for off-diagonal blocks.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="HFR_ALIGNER_",
        case_sensitive=False,
    )

    app_name: str = "hfr-aligner"
    app_tagline: str = "High-frame-rate visual-token aligner toolkit."
    root_dir: Path = Field(default_factory=lambda: Path(__file__).resolve().parent.parent)
    log_level: str = Field("INFO", description="The logging level.")

    seed: int = Field(default=0, description="Default random seed")

    # Desk-scale dimensions
    side: int = Field(default=32, ge=16, description="Frame side in pixels")
    patch_grid: int = Field(default=4, ge=1, description="Encoder patches per side")
    feature_dim: int = Field(default=24, ge=1, description="Encoder feature width d")
    hidden_dim: int = Field(default=32, ge=1, description="Aligner output width h")
    window: int = Field(default=16, ge=1, description="Frames per processing window w")
    train_fps: int = Field(default=16, ge=1, description="Training frame rate")
    frame_cap: int = Field(default=1760, ge=1, description="Maximum sampled frames per video")

    threads: int = Field(default=1, ge=1, description="Window-parallel worker threads")
    noise_scale: float = Field(default=1.0, ge=0.0, description="Off-diagonal noise multiplier")

    @field_validator("log_level")
    def validate_log_level(cls, v: str) -> str:
        """Validate the log level is a recognized value.

        Args:
            v: The log level value

        Returns:
            The validated log level

        Raises:
            ValueError: If log level is not valid
        """
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"log_level must be one of {', '.join(valid_levels)}")
        return v.upper()

    @field_validator("app_name")
    def validate_app_name(cls, v: str) -> str:
        """Validate the app name is not empty."""
        if not v.strip():
            raise ValueError("app_name must not be empty")
        return v

    @property
    def num_patches(self) -> int:
        """Number of encoder patches p."""
        return self.patch_grid * self.patch_grid

    def configure_logging(self) -> None:
        """Configure logging based on settings."""
        log_level = getattr(logging, self.log_level)
        logging.basicConfig(
            level=log_level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        )
        logger.debug(f"Logging configured with level {self.log_level}")

    @property
    def env_file_path(self) -> Optional[Path]:
        """Get the path to the loaded .env file.

        Returns:
            Path to the .env file if it exists, None otherwise
        """
        env_file = self.root_dir / str(self.model_config.get("env_file"))
        return env_file if env_file.exists() else None


def get_settings() -> Settings:
    """Get application settings from environment.

    Returns:
        Configured Settings instance
    """
    try:
        settings = Settings()
        settings.configure_logging()
        return settings
    except Exception as e:
        logger.error(f"Error loading settings: {e}")
        raise
