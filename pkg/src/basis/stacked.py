#!/usr/bin/env python3
"""
Stacked evaluation space: function values plus first and second partials.

A stacked vector on m nodes is a flat array of length ``m * d_tilde`` made of
``d_tilde`` blocks of length m in the order

    f | d1 .. dd | d11, d12, .., d1d, d22, .., ddd

The shift operator X_u multiplies by x_u jointly on all blocks (product rule)
and is applied matrix-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike

from ..errors import LayoutMismatchError
from .grevlex import MultiIndex


class DerivOrder(IntEnum):
    """Highest partial-derivative order carried in a stacked vector."""

    VALUES = 0
    FIRST = 1
    SECOND = 2

    @classmethod
    def coerce(cls, value: int | DerivOrder) -> DerivOrder:
        try:
            return cls(int(value))
        except ValueError as exc:
            raise ValueError(f"Derivative order must be 0, 1 or 2, got {value}") from exc


def stacked_dim(d: int, order: int | DerivOrder) -> int:
    """Number of blocks d_tilde for dimension d and the given order."""
    order = DerivOrder.coerce(order)
    if order == DerivOrder.VALUES:
        return 1
    if order == DerivOrder.FIRST:
        return 1 + d
    return 1 + d + d * (d + 1) // 2


def hessian_pairs(d: int) -> list[tuple[int, int]]:
    """Upper-triangular (j, k) pairs, j <= k, row-major, 0-based."""
    return [(j, k) for j in range(d) for k in range(j, d)]


def block_names(d: int, order: int | DerivOrder) -> list[str]:
    """Block names ``f``, ``d1``.., ``d11``.. in stacked order (1-based labels)."""
    order = DerivOrder.coerce(order)
    names = ["f"]
    sep = "" if d < 10 else "_"
    if order >= DerivOrder.FIRST:
        names += [f"d{j + 1}" for j in range(d)]
    if order >= DerivOrder.SECOND:
        names += [f"d{j + 1}{sep}{k + 1}" for j, k in hessian_pairs(d)]
    return names


@dataclass(frozen=True)
class NodeSet:
    """m nodes in d dimensions, row j holding node x_j."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords)
        if coords.ndim == 1:
            coords = coords.reshape(-1, 1)
        if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ValueError(f"Node coordinates must be a non-empty m x d array, got shape {coords.shape}")
        if not np.iscomplexobj(coords):
            coords = coords.astype(np.float64, copy=False)
        if not np.all(np.isfinite(coords)):
            raise ValueError("Node coordinates must be finite")
        coords = coords.copy()
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def m(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    def subset(self, rows: ArrayLike) -> NodeSet:
        return NodeSet(self.coords[np.asarray(rows)])

    @staticmethod
    def concatenate(*groups: NodeSet) -> NodeSet:
        return NodeSet(np.vstack([g.coords for g in groups]))


@dataclass(frozen=True)
class StackedLayout:
    """Shape of the stacked space for m nodes, dimension d and an order."""

    m: int
    d: int
    order: DerivOrder
    names: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", DerivOrder.coerce(self.order))
        if self.m < 1 or self.d < 1:
            raise ValueError(f"Invalid stacked layout m={self.m}, d={self.d}")
        object.__setattr__(self, "names", tuple(block_names(self.d, self.order)))

    @classmethod
    def for_nodes(cls, nodes: NodeSet, order: int | DerivOrder) -> StackedLayout:
        return cls(nodes.m, nodes.d, DerivOrder.coerce(order))

    @property
    def d_tilde(self) -> int:
        return stacked_dim(self.d, self.order)

    @property
    def size(self) -> int:
        return self.m * self.d_tilde

    @cached_property
    def _block_lookup(self) -> dict[str, int]:
        return {name: b for b, name in enumerate(self.names)}

    def block_index(self, name: str) -> int:
        try:
            return self._block_lookup[name]
        except KeyError:
            raise LayoutMismatchError(
                f"Block '{name}' is not part of the order-{int(self.order)} layout for d={self.d}"
            ) from None

    def hessian_block(self, j: int, k: int) -> int:
        """Block index of the second partial d_{j,k} (0-based coordinates)."""
        if j > k:
            j, k = k, j
        return 1 + self.d + hessian_pairs(self.d).index((j, k))

    def check(self, v: np.ndarray) -> None:
        if v.shape[0] != self.size:
            raise LayoutMismatchError(
                f"Stacked vector has {v.shape[0]} rows, expected {self.size} "
                f"(m={self.m}, d_tilde={self.d_tilde})"
            )

    def blocks(self, v: np.ndarray) -> np.ndarray:
        """View v (length size, optionally with trailing columns) as (d_tilde, m, ...)."""
        self.check(v)
        return v.reshape((self.d_tilde, self.m) + v.shape[1:])

    def split(self, v: np.ndarray) -> dict[str, np.ndarray]:
        view = self.blocks(v)
        return {name: view[b] for b, name in enumerate(self.names)}


def constant_column(nodes: NodeSet, order: int | DerivOrder, dtype: np.dtype | type = np.float64) -> np.ndarray:
    """Stacked evaluation of the constant polynomial 1."""
    layout = StackedLayout.for_nodes(nodes, order)
    v = np.zeros(layout.size, dtype=dtype)
    v[: layout.m] = 1
    return v


def apply_shift(u: int, v: np.ndarray, nodes: NodeSet, order: int | DerivOrder) -> np.ndarray:
    """Apply X_u (multiplication by x_u with the product rule) to stacked v.

    ``u`` is a 0-based coordinate. ``v`` may carry trailing columns, in which
    case each column is shifted independently.
    """
    layout = StackedLayout.for_nodes(nodes, order)
    if not 0 <= u < layout.d:
        raise ValueError(f"Coordinate {u} out of range for d={layout.d}")
    v = np.asarray(v)
    src = layout.blocks(v)
    chi = nodes.coords[:, u].reshape((layout.m,) + (1,) * (v.ndim - 1))
    out = np.multiply(chi, src)
    if layout.order >= DerivOrder.FIRST:
        out[1 + u] += src[0]
    if layout.order >= DerivOrder.SECOND:
        base = 1 + layout.d
        for p, (j, k) in enumerate(hessian_pairs(layout.d)):
            if j == u:
                out[base + p] += src[1 + k]
            if k == u:
                out[base + p] += src[1 + j]
    return out.reshape(v.shape)


def monomial_column(alpha: MultiIndex | tuple[int, ...], nodes: NodeSet, order: int | DerivOrder) -> np.ndarray:
    """Exact stacked evaluation of x^alpha and its partials at the nodes."""
    exps = np.asarray(alpha.exponents if isinstance(alpha, MultiIndex) else alpha, dtype=np.int64)
    layout = StackedLayout.for_nodes(nodes, order)
    if exps.shape != (layout.d,):
        raise LayoutMismatchError(f"Multi-index of length {exps.size} does not match d={layout.d}")
    x = nodes.coords

    def term(powers: np.ndarray, scale: int) -> np.ndarray:
        if scale == 0:
            return np.zeros(layout.m, dtype=x.dtype)
        return scale * np.prod(x ** powers, axis=1)

    out = np.empty((layout.d_tilde, layout.m), dtype=x.dtype)
    out[0] = term(exps, 1)
    if layout.order >= DerivOrder.FIRST:
        for j in range(layout.d):
            lowered = exps.copy()
            lowered[j] -= 1
            out[1 + j] = term(np.maximum(lowered, 0), int(exps[j]))
    if layout.order >= DerivOrder.SECOND:
        for p, (j, k) in enumerate(hessian_pairs(layout.d)):
            lowered = exps.copy()
            lowered[j] -= 1
            lowered[k] -= 1
            scale = int(exps[j] * (exps[j] - 1)) if j == k else int(exps[j] * exps[k])
            out[1 + layout.d + p] = term(np.maximum(lowered, 0), scale)
    return out.reshape(-1)


def shift_matrix(u: int, nodes: NodeSet, order: int | DerivOrder):
    """Assemble X_u explicitly as a sparse matrix.

    Only meant for diagnostics and cross-checks; the fit applies shifts
    through :func:`apply_shift`.
    """
    from scipy import sparse

    layout = StackedLayout.for_nodes(nodes, order)
    m, dt = layout.m, layout.d_tilde
    chi = sparse.diags(nodes.coords[:, u])
    eye = sparse.identity(m, format="csr")
    grid = [[None] * dt for _ in range(dt)]
    for b in range(dt):
        grid[b][b] = chi
    if layout.order >= DerivOrder.FIRST:
        grid[1 + u][0] = eye
    if layout.order >= DerivOrder.SECOND:
        base = 1 + layout.d
        for p, (j, k) in enumerate(hessian_pairs(layout.d)):
            if j == u and k == u:
                grid[base + p][1 + u] = 2 * eye
            elif j == u:
                grid[base + p][1 + k] = eye
            elif k == u:
                grid[base + p][1 + j] = eye
    return sparse.bmat(grid, format="csr")
