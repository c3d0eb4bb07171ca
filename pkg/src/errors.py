#!/usr/bin/env python3
"""
Exception hierarchy for the mvga package.
"""

from __future__ import annotations


class MvgaError(Exception):
    """Base class for all errors raised by mvga."""


class BasisSizeError(MvgaError, OverflowError):
    """Raised when a basis dimension cannot be indexed."""

    def __init__(self, d: int, n: int, size: int):
        super().__init__(
            f"Total-degree basis for d={d}, n={n} has {size} elements, "
            "which exceeds the indexable size"
        )
        self.d = d
        self.n = n
        self.size = size


class LayoutMismatchError(MvgaError, ValueError):
    """Raised when a stacked vector does not match the expected layout."""


class DimensionMismatchError(MvgaError, ValueError):
    """Raised when node dimensions disagree with a fitted model."""


class FitError(MvgaError, ArithmeticError):
    """Raised when the fitting recurrence cannot proceed."""


class DegenerateMapError(FitError):
    """Raised when the constant column has zero G-norm."""


class NonFiniteError(FitError):
    """Raised when NaN or Inf values appear in the recurrence."""

    def __init__(self, column: int):
        super().__init__(f"Non-finite values encountered while building column {column}")
        self.column = column


class MissingBasisStoreError(MvgaError, RuntimeError):
    """Raised when the stored Q columns are required but were discarded."""


class MissingCoefficientsError(MvgaError, RuntimeError):
    """Raised when a model without coefficients is evaluated as a polynomial."""


class ModelFormatError(MvgaError, ValueError):
    """Raised when a serialized model or map is malformed."""
