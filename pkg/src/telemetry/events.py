#!/usr/bin/env python3
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FitCompleted:
    """Event emitted when the fitting stage finishes."""
    d: int
    n: int
    order: int
    m: int
    r: int
    g: int
    t: int
    duration_s: float


@dataclass(frozen=True)
class BreakdownDetected:
    """Event emitted when the Gram-Schmidt residual vanishes before column g."""
    column: int
    residual_norm: float
    shifted_norm: float
    g: int


@dataclass(frozen=True)
class SolveCompleted:
    """Event emitted after the coefficient solve."""
    path: str
    rows: int
    t: int
    orthogonality_residual: float
    duration_s: float


@dataclass(frozen=True)
class EvaluationCompleted:
    """Event emitted after the basis has been evaluated at new nodes."""
    nodes: int
    t: int
    order: int
    extrapolating: bool
    duration_s: float
