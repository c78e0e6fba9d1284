"""
Analysis Package

Cosine-similarity reports, token budgets and the compute cost model.
"""

from .budget import token_budget
from .cosine import CosineReport, CosineRow, cosine_report
from .cost import COST_PRESETS, CostConfig, CostReport, cost_model, cost_sweep
from .verify import AveragingResult, GradientResult, build_averaging_pair, verify_averaging, verify_gradients

__all__ = [
    "AveragingResult",
    "COST_PRESETS",
    "CosineReport",
    "CosineRow",
    "CostConfig",
    "CostReport",
    "GradientResult",
    "build_averaging_pair",
    "cost_model",
    "cost_sweep",
    "cosine_report",
    "token_budget",
    "verify_averaging",
    "verify_gradients",
]
