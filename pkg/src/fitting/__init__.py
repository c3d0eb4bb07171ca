"""Fitting and evaluation stages of the G-orthogonal polynomial basis."""

from .arnoldi import FitModel, fit, gram_check
from .evaluation import StackedOutput, eval_basis, eval_poly

__all__ = ["FitModel", "StackedOutput", "eval_basis", "eval_poly", "fit", "gram_check"]
