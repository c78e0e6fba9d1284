"""
Flag validation for the command-line interface.

Every flag is checked here before a command reads or writes any file.
"""

import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from hfr_aligner.exceptions import ConfigError

logger = logging.getLogger(__name__)


class ArgumentValidator:
    """Range and format checks for individual flags."""

    def validate_positive_int(self, name: str, value: int) -> int:
        """Validate a positive integer flag.

        Args:
            name: Flag name
            value: Parsed value

        Returns:
            The validated value

        Raises:
            ConfigError: If the value is not an integer of at least 1
        """
        if not isinstance(value, int):
            raise ConfigError(name, value, "must be an integer")
        if value < 1:
            raise ConfigError(name, value, "must be at least 1")
        return value

    def validate_non_negative(self, name: str, value: float) -> float:
        if not isinstance(value, (int, float)):
            raise ConfigError(name, value, "must be a number")
        if value < 0:
            raise ConfigError(name, value, "must be non-negative")
        return float(value)

    def validate_positive(self, name: str, value: float) -> float:
        if not isinstance(value, (int, float)):
            raise ConfigError(name, value, "must be a number")
        if not value > 0:
            raise ConfigError(name, value, "must be positive")
        return float(value)

    def parse_int_list(self, name: str, text: str) -> List[int]:
        """Parse a comma-separated list of non-negative integers.

        Raises:
            ConfigError: If the list is empty or an entry is not a non-negative integer
        """
        try:
            values = [int(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise ConfigError(name, text, "must be comma-separated integers")
        if not values:
            raise ConfigError(name, text, "must list at least one value")
        for value in values:
            if value < 0:
                raise ConfigError(name, value, "must be non-negative")
        return values

    def parse_float_list(self, name: str, text: str) -> List[float]:
        try:
            values = [float(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise ConfigError(name, text, "must be comma-separated numbers")
        if not values:
            raise ConfigError(name, text, "must list at least one value")
        return values


class RunConfig(BaseModel):
    """A validated command invocation.

    Attributes:
        command: Subcommand name, with the report name for ``analyze``
        seed: Seed for every random draw of the command
        inputs: Input archives by flag name; each must exist
        output: Output file, whose parent directory must exist
        dims: Dimension overrides by flag name; each must be positive
        threads: Worker threads
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    seed: int = 0
    inputs: Dict[str, Path] = Field(default_factory=dict)
    output: Optional[Path] = None
    dims: Dict[str, int] = Field(default_factory=dict)
    threads: int = Field(default=1, ge=1)

    @field_validator("inputs")
    def validate_inputs(cls, v: Dict[str, Path]) -> Dict[str, Path]:
        for name, path in v.items():
            if not path.is_file():
                raise ValueError(f"--{name} {path} does not exist")
        return v

    @field_validator("output")
    def validate_output(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and not v.parent.is_dir():
            raise ValueError(f"output directory {v.parent} does not exist")
        return v

    @field_validator("dims")
    def validate_dims(cls, v: Dict[str, int]) -> Dict[str, int]:
        for name, value in v.items():
            if value < 1:
                raise ValueError(f"--{name} must be at least 1, got {value}")
        return v


_INPUT_FLAGS = ("features", "weights", "base", "model")
_DIM_FLAGS = ("w", "d", "h", "p", "fps", "side", "patch_grid", "frames", "trials", "epochs", "batch")
_OUTPUT_FLAGS = ("out", "report", "csv")


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Collect and validate the flags of a parsed command line.

    Raises:
        pydantic.ValidationError: If a path or dimension is invalid
        ConfigError: If a secondary output path is invalid
    """
    command = args.command if args.command != "analyze" else f"analyze {args.analysis}"
    inputs = {
        name: Path(value) for name in _INPUT_FLAGS if (value := getattr(args, name, None)) is not None
    }
    dims = {
        name.replace("_", "-"): value
        for name in _DIM_FLAGS
        if isinstance(value := getattr(args, name, None), int)
    }
    outputs = [Path(value) for name in _OUTPUT_FLAGS if (value := getattr(args, name, None)) is not None]
    for extra in outputs[1:]:
        if not extra.parent.is_dir():
            raise ConfigError("output", str(extra), "directory does not exist")

    config = RunConfig(
        command=command,
        seed=getattr(args, "seed", 0),
        inputs=inputs,
        output=outputs[0] if outputs else None,
        dims=dims,
        threads=getattr(args, "threads", 1),
    )
    logger.debug(f"Validated {config.command}: inputs={list(config.inputs)} output={config.output}")
    return config
