#!/usr/bin/env python3
"""
Graded monomial basis of the total-degree space and its parent table.

Monomials are ordered by total degree first; ties are broken at the first
coordinate where the exponents differ, larger exponent first. Every element
after the constant is generated from an earlier one by multiplication with a
single coordinate, ``phi_i = x_u * phi_s``, with ``s`` the smallest such index.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from ..errors import BasisSizeError

logger = logging.getLogger("mvga.basis")

MAX_BASIS_SIZE = int(np.iinfo(np.intp).max)


@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector of a monomial x^alpha."""

    exponents: tuple[int, ...]
    total_degree: int = field(init=False)

    def __post_init__(self) -> None:
        if len(self.exponents) < 1:
            raise ValueError("A multi-index needs at least one coordinate")
        if any(a < 0 for a in self.exponents):
            raise ValueError(f"Exponents must be nonnegative: {self.exponents}")
        object.__setattr__(self, "total_degree", sum(self.exponents))

    @property
    def d(self) -> int:
        return len(self.exponents)

    def shifted(self, u: int) -> MultiIndex:
        """Return alpha + e_u (0-based coordinate)."""
        exps = list(self.exponents)
        exps[u] += 1
        return MultiIndex(tuple(exps))

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return self.total_degree, tuple(-a for a in self.exponents)

    def precedes(self, other: MultiIndex) -> bool:
        """Return True when self appears before other in the graded ordering."""
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class GrevlexBasis:
    """Ordered total-degree basis with optional parent table.

    ``parent_s`` and ``parent_u`` are 0-based and have one entry per basis
    element; entry 0 (the constant) holds -1. Use :meth:`parent_table` for
    the 1-based form written to files.
    """

    d: int
    n: int
    indices: tuple[MultiIndex, ...]
    parent_s: tuple[int, ...] | None = None
    parent_u: tuple[int, ...] | None = None

    @property
    def g(self) -> int:
        return len(self.indices)

    @property
    def has_parents(self) -> bool:
        return self.parent_s is not None and self.parent_u is not None

    def exponent_matrix(self) -> np.ndarray:
        """Return a g x d integer array of exponents."""
        return np.array([mi.exponents for mi in self.indices], dtype=np.int64).reshape(self.g, self.d)

    def position(self) -> dict[tuple[int, ...], int]:
        return {mi.exponents: i for i, mi in enumerate(self.indices)}

    def parent_table(self) -> tuple[list[int], list[int]]:
        """Return (parent_s, parent_u) for i = 2..g in 1-based numbering."""
        if not self.has_parents:
            raise ValueError("Parent table has not been built")
        s = [self.parent_s[i] + 1 for i in range(1, self.g)]
        u = [self.parent_u[i] + 1 for i in range(1, self.g)]
        return s, u

    def truncated(self, t: int) -> GrevlexBasis:
        """Return the first t elements (the parent table stays consistent)."""
        return replace(
            self,
            indices=self.indices[:t],
            parent_s=None if self.parent_s is None else self.parent_s[:t],
            parent_u=None if self.parent_u is None else self.parent_u[:t],
        )

    def to_dict(self) -> dict:
        summary: dict = {
            "d": self.d,
            "n": self.n,
            "g": self.g,
            "indices": [list(mi.exponents) for mi in self.indices],
        }
        if self.has_parents:
            summary["parent_s"], summary["parent_u"] = self.parent_table()
        return summary

    @classmethod
    def from_parent_table(
        cls, d: int, n: int, parent_s: list[int], parent_u: list[int]
    ) -> GrevlexBasis:
        """Rebuild a basis from a 1-based parent table (as stored in model files)."""
        full = build_parent_table(enumerate_basis(d, n))
        g = len(parent_s) + 1
        if len(parent_u) != g - 1 or g > full.g:
            raise ValueError("Parent table does not fit the requested basis")
        basis = full.truncated(g)
        expected_s, expected_u = basis.parent_table()
        if expected_s != list(parent_s) or expected_u != list(parent_u):
            raise ValueError("Parent table does not match the graded ordering")
        return basis


def basis_size(d: int, n: int) -> int:
    """Return dim of the total-degree space, C(n+d, d)."""
    if d < 1:
        raise ValueError(f"Dimension must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"Degree must be >= 0, got {n}")
    size = math.comb(n + d, d)
    if size > MAX_BASIS_SIZE:
        raise BasisSizeError(d, n, size)
    return size


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # Descending in the first coordinate, recursively; this is the tie order.
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_basis(d: int, n: int) -> GrevlexBasis:
    """Enumerate all multi-indices with |alpha| <= n in graded order."""
    g = basis_size(d, n)
    indices = tuple(
        MultiIndex(exps) for degree in range(n + 1) for exps in _compositions(degree, d)
    )
    assert len(indices) == g
    return GrevlexBasis(d=d, n=n, indices=indices)


def build_parent_table(basis: GrevlexBasis) -> GrevlexBasis:
    """Fill the minimal generating parent (s_i, u_i) for each element."""
    pos = basis.position()
    parent_s = [-1]
    parent_u = [-1]
    for i in range(1, basis.g):
        exps = basis.indices[i].exponents
        best: tuple[int, int] | None = None
        for u in range(basis.d):
            if exps[u] == 0:
                continue
            lowered = exps[:u] + (exps[u] - 1,) + exps[u + 1:]
            j = pos.get(lowered)
            if j is not None and (best is None or j < best[0]):
                best = (j, u)
        if best is None or best[0] >= i:
            raise AssertionError(f"No parent for basis element {i} {exps}")
        parent_s.append(best[0])
        parent_u.append(best[1])
    logger.debug("Parent table built for d=%d n=%d g=%d", basis.d, basis.n, basis.g)
    return replace(basis, parent_s=tuple(parent_s), parent_u=tuple(parent_u))


def grevlex_basis(d: int, n: int) -> GrevlexBasis:
    """Enumerate and attach the parent table in one call."""
    return build_parent_table(enumerate_basis(d, n))
