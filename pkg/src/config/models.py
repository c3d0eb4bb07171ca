#!/usr/bin/env python3
"""
Configuration models for problem specifications.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..applications.testfunctions import ALPHA_FUNCTIONS, TEST_FUNCTIONS

# Stacked order each application fits in
APP_ORDERS = {
    "interpolation": 0,
    "hermite": 1,
    "poisson_dirichlet": 2,
    "poisson_mixed": 2,
}

DOMAIN_KINDS = ("disk", "ellipse_minus_disk", "polygon")


@dataclass(frozen=True)
class AlphaSpec:
    """Coefficient alpha of u + alpha * Lap(u): a constant or a registered function."""

    constant: Optional[float] = None
    name: Optional[str] = None

    def __post_init__(self) -> None:
        self._validate()

    def _validate(self) -> None:
        if (self.constant is None) == (self.name is None):
            raise ValueError("Alpha needs exactly one of a constant or a function name")
        if self.constant is not None and not np.isfinite(self.constant):
            raise ValueError(f"Alpha constant must be finite, got {self.constant}")
        if self.name is not None and self.name not in ALPHA_FUNCTIONS:
            raise ValueError(f"Unknown alpha function '{self.name}'; known: {sorted(ALPHA_FUNCTIONS)}")

    def sample(self, coords: np.ndarray) -> np.ndarray:
        if self.name is not None:
            return ALPHA_FUNCTIONS[self.name](coords)
        return np.full(coords.shape[0], float(self.constant))

    def describe(self) -> str:
        return self.name if self.name is not None else f"const:{self.constant!r}"


@dataclass(frozen=True)
class DomainSpec:
    """Planar domain with interior and boundary node targets.

    ``boundary`` is a total or one count per boundary curve.
    """

    kind: str
    interior: int
    boundary: Union[int, Tuple[int, ...]]
    vertices: Optional[Tuple[Tuple[float, float], ...]] = None
    jitter: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.boundary, int):
            object.__setattr__(self, "boundary", tuple(int(b) for b in self.boundary))
        self._validate()

    def _validate(self) -> None:
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"Unknown domain '{self.kind}'; known: {list(DOMAIN_KINDS)}")
        if self.interior < 1:
            raise ValueError("Interior node target must be positive")
        counts = (self.boundary,) if isinstance(self.boundary, int) else self.boundary
        if not counts or any(c < 1 for c in counts):
            raise ValueError("Boundary node targets must be positive")
        if self.kind == "polygon" and not self.vertices:
            raise ValueError("A polygon domain needs vertices")
        if not 0.0 <= self.jitter < 1.0:
            raise ValueError(f"Jitter must lie in [0, 1), got {self.jitter}")


@dataclass(frozen=True)
class ProblemSpec:
    """A least-squares problem to fit and solve.

    Node data comes either from a generated ``domain`` or from ``nodes_path``
    (and ``values_path`` for interpolation); ``function`` names the test
    function that manufactures the data otherwise.
    """

    app: str
    degree: int
    order: Optional[int] = None
    domain: Optional[DomainSpec] = None
    nodes_path: Optional[Path] = None
    values_path: Optional[Path] = None
    function: Optional[str] = None
    alpha: AlphaSpec = field(default_factory=lambda: AlphaSpec(constant=0.0))
    neumann_curve: int = 0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.order is None:
            object.__setattr__(self, "order", APP_ORDERS.get(self.app, 0))
        self._validate()

    def _validate(self) -> None:
        if self.app not in APP_ORDERS:
            raise ValueError(f"Unknown application '{self.app}'; known: {sorted(APP_ORDERS)}")
        if self.degree < 0:
            raise ValueError(f"Degree must be non-negative, got {self.degree}")
        if self.order not in (0, 1, 2):
            raise ValueError(f"Order must be 0, 1 or 2, got {self.order}")
        if self.order < APP_ORDERS[self.app]:
            raise ValueError(f"Application '{self.app}' needs order >= {APP_ORDERS[self.app]}")
        if (self.domain is None) == (self.nodes_path is None):
            raise ValueError("Give exactly one of 'domain' or 'nodes'")
        if self.nodes_path is not None and self.app != "interpolation":
            raise ValueError("Node files are only supported for interpolation problems")
        if self.values_path is None and self.function is None:
            raise ValueError("Give either 'values' or a test 'function'")
        if self.function is not None and self.function not in TEST_FUNCTIONS:
            raise ValueError(f"Unknown test function '{self.function}'; known: {sorted(TEST_FUNCTIONS)}")
