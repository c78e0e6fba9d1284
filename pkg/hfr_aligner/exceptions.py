"""
HFR Aligner Exceptions

This module defines the exception hierarchy shared by every sub-package.
"""

from typing import Any, Optional, Sequence, Union

Dims = Union[int, Sequence[int], str]


def _fmt_dims(dims: Dims) -> str:
    if isinstance(dims, (str, int)):
        return str(dims)
    return "x".join(str(d) for d in dims)


class HfrAlignerError(Exception):
    """Base exception class for hfr-aligner errors."""

    def __init__(self, message: str):
        """Initialize with an error message."""
        self.message = message
        super().__init__(message)


class ShapeError(HfrAlignerError):
    """Error when tensor dimensions do not agree."""

    def __init__(self, operation: str, expected: Dims, actual: Dims):
        """Initialize with the operation name and both offending dims."""
        self.operation = operation
        self.expected = expected
        self.actual = actual
        message = f"{operation}: shape mismatch, expected {_fmt_dims(expected)} but got {_fmt_dims(actual)}"
        super().__init__(message)


class ConfigError(HfrAlignerError):
    """Error when an invalid parameter is provided."""

    def __init__(self, parameter: str, value: Any, reason: str):
        """Initialize with parameter name, value and reason."""
        self.parameter = parameter
        self.value = value
        self.reason = reason
        message = f"Invalid parameter '{parameter}' with value '{value}': {reason}"
        super().__init__(message)


class UnsupportedRateError(HfrAlignerError):
    """Error when frames are requested above the native frame rate."""

    def __init__(self, target_fps: int, native_fps: int):
        """Initialize with the requested and the native rate."""
        self.target_fps = target_fps
        self.native_fps = native_fps
        message = f"Target rate {target_fps} FPS exceeds native rate {native_fps} FPS"
        super().__init__(message)


class FormatError(HfrAlignerError):
    """Error when an archive or tensor container is malformed."""

    def __init__(self, source: str, reason: str):
        """Initialize with the source (path or stream name) and reason."""
        self.source = source
        self.reason = reason
        super().__init__(f"Malformed archive {source}: {reason}")


class ArchiveIOError(HfrAlignerError, OSError):
    """Error when an archive payload cannot be read completely."""

    def __init__(self, source: str, reason: str):
        """Initialize with the source (path or stream name) and reason."""
        self.source = source
        self.reason = reason
        message = f"I/O error reading {source}: {reason}"
        HfrAlignerError.__init__(self, message)


class OracleError(HfrAlignerError):
    """Error when the finite-difference oracle sees non-finite values."""

    def __init__(self, reason: str, index: Optional[Sequence[int]] = None):
        """Initialize with a reason and optionally the perturbed element index."""
        self.index = tuple(index) if index is not None else None
        message = f"Gradient oracle failed: {reason}"
        if self.index is not None:
            message += f" at element {self.index}"
        super().__init__(message)


class TrainingError(HfrAlignerError):
    """Error when training diverges."""

    def __init__(self, step: int, loss: float):
        """Initialize with the optimizer step and the offending loss value."""
        self.step = step
        self.loss = loss
        super().__init__(f"Training diverged at step {step}: loss={loss}")


# Errors that mean "the caller asked for something invalid" (CLI exit code 2).
USAGE_ERRORS = (ConfigError, UnsupportedRateError)
