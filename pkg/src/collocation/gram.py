#!/usr/bin/env python3
"""
Collocation maps realizing positive-semidefinite G-inner products.

A map L is a list of sparse rows over the stacked space; the inner product
is <y, z>_G = (L y)^H (L z), so G = L^H L is never formed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from ..basis.stacked import DerivOrder, StackedLayout
from ..errors import LayoutMismatchError, ModelFormatError


@dataclass(frozen=True)
class CollocationTerm:
    """One weighted entry ``weight * v.block[node]`` (node is 0-based)."""

    block: str
    node: int
    weight: complex | float = 1.0


@dataclass(frozen=True)
class CollocationRow:
    terms: tuple[CollocationTerm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("A collocation row needs at least one term")

    @classmethod
    def single(cls, block: str, node: int, weight: complex | float = 1.0) -> CollocationRow:
        return cls((CollocationTerm(block, node, weight),))


@dataclass(frozen=True)
class CollocationMap:
    """Linear map L from the stacked space (m, d, order) to R^r."""

    rows: tuple[CollocationRow, ...]
    layout: StackedLayout
    _operator: sparse.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.rows:
            raise ValueError("A collocation map needs at least one row")
        object.__setattr__(self, "_operator", self._assemble())

    @classmethod
    def from_rows(
        cls, rows: Iterable[CollocationRow], m: int, d: int, order: int | DerivOrder
    ) -> CollocationMap:
        return cls(tuple(rows), StackedLayout(m, d, DerivOrder.coerce(order)))

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return self.layout.m

    @property
    def d(self) -> int:
        return self.layout.d

    @property
    def order(self) -> DerivOrder:
        return self.layout.order

    @property
    def operator(self) -> sparse.csr_matrix:
        """The r x (m * d_tilde) sparse matrix of L."""
        return self._operator

    @cached_property
    def dtype(self) -> np.dtype:
        return self._operator.dtype

    def _assemble(self) -> sparse.csr_matrix:
        row_idx: list[int] = []
        col_idx: list[int] = []
        weights: list[complex | float] = []
        m = self.layout.m
        for rho, row in enumerate(self.rows):
            for term in row.terms:
                if not 0 <= term.node < m:
                    raise LayoutMismatchError(
                        f"Row {rho} references node {term.node}, outside 0..{m - 1}"
                    )
                b = self.layout.block_index(term.block)
                row_idx.append(rho)
                col_idx.append(b * m + term.node)
                weights.append(term.weight)
        data = np.asarray(weights)
        if not np.iscomplexobj(data):
            data = data.astype(np.float64)
        if not np.all(np.isfinite(data)):
            raise ValueError("Collocation weights must be finite")
        # Duplicate (row, column) entries are summed by the COO -> CSR conversion.
        return sparse.coo_matrix(
            (data, (row_idx, col_idx)), shape=(self.r, self.layout.size)
        ).tocsr()

    def to_dict(self) -> dict:
        def encode(w):
            return [w.real, w.imag] if isinstance(w, complex) else float(w)

        return {
            "m": self.m,
            "d": self.d,
            "order": int(self.order),
            "rows": [[[t.block, t.node + 1, encode(t.weight)] for t in row.terms] for row in self.rows],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, payload: dict) -> CollocationMap:
        try:
            rows = []
            for raw in payload["rows"]:
                terms = []
                for block, node, weight in raw:
                    if isinstance(weight, list):
                        weight = complex(weight[0], weight[1])
                    terms.append(CollocationTerm(str(block), int(node) - 1, weight))
                rows.append(CollocationRow(tuple(terms)))
            return cls.from_rows(rows, int(payload["m"]), int(payload["d"]), int(payload["order"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"Malformed collocation map: {exc}") from exc


def _as_stacked(cmap: CollocationMap, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[0] != cmap.layout.size:
        raise LayoutMismatchError(
            f"Stacked vector has {v.shape[0]} rows, map expects {cmap.layout.size}"
        )
    return v


def apply_map(cmap: CollocationMap, v: np.ndarray) -> np.ndarray:
    """Return L v (columns of a 2-D v are mapped independently)."""
    return cmap.operator @ _as_stacked(cmap, v)


def g_inner(cmap: CollocationMap, y: np.ndarray, z: np.ndarray):
    """<y, z>_G = (L y)^H (L z), conjugating the first argument."""
    return np.vdot(apply_map(cmap, y), apply_map(cmap, z))


def g_norm(cmap: CollocationMap, y: np.ndarray) -> float:
    """sqrt(<y, y>_G), clamping round-off below zero."""
    ly = apply_map(cmap, y)
    return float(np.sqrt(max(np.vdot(ly, ly).real, 0.0)))


def dense_gram(cmap: CollocationMap) -> np.ndarray:
    """Assemble G = L^H L densely (small maps only; used for cross-checks)."""
    dense = cmap.operator.toarray()
    return dense.conj().T @ dense


def selection_map(
    layout: StackedLayout, selections: Sequence[tuple[str, Iterable[int]]]
) -> CollocationMap:
    """Map with one unit-weight row per (block, node) pair."""
    rows = [CollocationRow.single(block, int(j)) for block, nodes in selections for j in nodes]
    return CollocationMap(tuple(rows), layout)


def identity_map(layout: StackedLayout) -> CollocationMap:
    """Map selecting every stacked entry; <., .>_G is then the plain dot product."""
    return selection_map(layout, [(name, range(layout.m)) for name in layout.names])
