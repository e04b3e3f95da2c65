from .metrics import EvalReport, acc_at_k, evaluate_sbir, evaluate_synthetic
from .preference import PreferenceTally, aggregate_preference

__all__ = [
    "EvalReport",
    "acc_at_k",
    "evaluate_sbir",
    "evaluate_synthetic",
    "PreferenceTally",
    "aggregate_preference",
]
