"""
CLI Package

Argument parsing, flag validation and command implementations.
"""

from .commands import COMMANDS
from .parser import build_parser
from .validation import ArgumentValidator, RunConfig, build_run_config

__all__ = ["COMMANDS", "ArgumentValidator", "RunConfig", "build_parser", "build_run_config"]
