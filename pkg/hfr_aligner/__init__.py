"""
hfr-aligner

Desk-scale toolkit for high-frame-rate video understanding: an aligner that
compresses windows of frame features into visual tokens, its block-matrix
initialization, variable-frame-rate decoding, a toy training pipeline and
diagnostic reports.
"""

from .app import main
from .settings import Settings, get_settings

__all__ = ["Settings", "get_settings", "main"]
