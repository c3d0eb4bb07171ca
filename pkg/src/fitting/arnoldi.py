#!/usr/bin/env python3
"""
Fitting stage: G-orthonormal stacked basis by the shift-and-orthogonalize
recurrence.

Column 1 is the normalized constant. Column i shifts column s_i by x_{u_i}
(product rule on the derivative blocks) and orthogonalizes it against all
previous columns with two classical Gram-Schmidt passes in the G-inner
product. The projections accumulate into the upper-triangular R~ with
K = Q R~, which is all the evaluation stage needs.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from ..basis.grevlex import GrevlexBasis
from ..basis.stacked import DerivOrder, NodeSet, StackedLayout, apply_shift, constant_column, monomial_column
from ..collocation.gram import CollocationMap, apply_map
from ..config.config import runtime_config
from ..errors import (
    DegenerateMapError,
    DimensionMismatchError,
    LayoutMismatchError,
    MissingBasisStoreError,
    NonFiniteError,
)
from ..telemetry.events import BreakdownDetected, FitCompleted
from ..telemetry.pipeline import TelemetryPipeline, publish

logger = logging.getLogger("mvga.fitting.arnoldi")

GS_PASSES = 2


@dataclass(frozen=True)
class FitModel:
    """Result of the fitting stage.

    ``rtilde`` is t x t upper triangular with positive diagonal. ``q`` holds
    the G-orthonormal stacked columns when retained. ``breakdown`` is the
    1-based column at which the recurrence broke down, or None.
    """

    basis: GrevlexBasis
    nodes: NodeSet
    order: DerivOrder
    cmap: CollocationMap
    t: int
    rtilde: np.ndarray
    q: np.ndarray | None = None
    coeffs: np.ndarray | None = None
    breakdown: int | None = None

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def g(self) -> int:
        return self.basis.g

    @property
    def layout(self) -> StackedLayout:
        return StackedLayout.for_nodes(self.nodes, self.order)

    def parents(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """0-based (s_i, u_i) for the first t basis elements."""
        return self.basis.parent_s[: self.t], self.basis.parent_u[: self.t]

    def with_coeffs(self, coeffs: np.ndarray) -> FitModel:
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.t,):
            raise ValueError(f"Expected {self.t} coefficients, got shape {coeffs.shape}")
        return replace(self, coeffs=coeffs)

    def without_q(self) -> FitModel:
        return replace(self, q=None)

    def require_q(self) -> np.ndarray:
        if self.q is None:
            raise MissingBasisStoreError("The fitted Q columns were discarded")
        return self.q


def _g_norm_of(lv: np.ndarray) -> float:
    return float(np.sqrt(max(np.vdot(lv, lv).real, 0.0)))


def _check_inputs(nodes: NodeSet, basis: GrevlexBasis, cmap: CollocationMap, order: DerivOrder) -> None:
    if not basis.has_parents:
        raise ValueError("The basis needs its parent table; call build_parent_table first")
    if basis.d != nodes.d:
        raise DimensionMismatchError(f"Basis is {basis.d}-dimensional, nodes are {nodes.d}-dimensional")
    expected = StackedLayout.for_nodes(nodes, order)
    if cmap.layout != expected:
        raise LayoutMismatchError(
            f"Collocation map context (m={cmap.m}, d={cmap.d}, order={int(cmap.order)}) does not "
            f"match nodes (m={nodes.m}, d={nodes.d}) at order {int(order)}"
        )


def fit(
    nodes: NodeSet,
    basis: GrevlexBasis,
    cmap: CollocationMap,
    order: int | DerivOrder | None = None,
    *,
    breakdown_tol: float | None = None,
    keep_q: bool = True,
    passes: int = GS_PASSES,
    telemetry: TelemetryPipeline | None = None,
) -> FitModel:
    """Run the fitting stage and return the fitted model.

    ``passes`` is the number of Gram-Schmidt sweeps per column; anything
    other than two is only useful for diagnostics.
    """
    order = cmap.order if order is None else DerivOrder.coerce(order)
    _check_inputs(nodes, basis, cmap, order)
    if breakdown_tol is None:
        breakdown_tol = runtime_config.settings().breakdown_tol

    started = time.perf_counter()
    g = basis.g
    L = cmap.operator
    dtype = np.result_type(nodes.coords.dtype, cmap.dtype, np.float64)
    size = cmap.layout.size

    Q = np.zeros((size, g), dtype=dtype, order="F")
    LQ = np.zeros((cmap.r, g), dtype=dtype, order="F")
    R = np.zeros((g, g), dtype=dtype)

    e = constant_column(nodes, order, dtype=dtype)
    le = L @ e
    r11 = _g_norm_of(le)
    if r11 == 0.0:
        raise DegenerateMapError(
            "The constant column has zero G-norm: no row of the map sees the function block"
        )
    R[0, 0] = r11
    Q[:, 0] = e / r11
    LQ[:, 0] = le / r11

    t = g
    breakdown = None
    for i in range(1, g):
        s, u = basis.parent_s[i], basis.parent_u[i]
        q = apply_shift(u, Q[:, s], nodes, order)
        lq = L @ q
        k_norm = _g_norm_of(lq)
        for _ in range(passes):
            proj = LQ[:, :i].conj().T @ lq
            q -= Q[:, :i] @ proj
            R[:i, i] += proj
            lq = L @ q
        r_ii = _g_norm_of(lq)
        if not (np.isfinite(r_ii) and np.all(np.isfinite(R[:i, i]))):
            raise NonFiniteError(i + 1)
        if r_ii <= breakdown_tol * k_norm or r_ii == 0.0:
            t = i
            breakdown = i + 1
            logger.warning(
                "Breakdown at column %d of %d (residual %.3e, shifted norm %.3e); truncating to t=%d",
                breakdown, g, r_ii, k_norm, t,
            )
            publish(telemetry, BreakdownDetected(column=breakdown, residual_norm=r_ii, shifted_norm=k_norm, g=g))
            break
        R[i, i] = r_ii
        Q[:, i] = q / r_ii
        LQ[:, i] = lq / r_ii

    duration = time.perf_counter() - started
    logger.debug("Fit finished: d=%d n=%d m=%d r=%d g=%d t=%d in %.3fs",
                 basis.d, basis.n, nodes.m, cmap.r, g, t, duration)
    publish(telemetry, FitCompleted(d=basis.d, n=basis.n, order=int(order), m=nodes.m, r=cmap.r,
                                    g=g, t=t, duration_s=duration))
    return FitModel(
        basis=basis,
        nodes=nodes,
        order=order,
        cmap=cmap,
        t=t,
        rtilde=R[:t, :t].copy(),
        q=np.ascontiguousarray(Q[:, :t]) if keep_q else None,
        breakdown=breakdown,
    )


def coefficient_matrix(model: FitModel) -> np.ndarray:
    """A = L Q, the r x t least-squares matrix of the fitted model."""
    return np.asarray(apply_map(model.cmap, model.require_q()))


def gram_check(model: FitModel) -> float:
    """Return max |<q_i, q_j>_G - delta_ij| over the retained columns."""
    A = coefficient_matrix(model)
    gram = A.conj().T @ A
    return float(np.max(np.abs(gram - np.eye(model.t))))


def hessenberg(model: FitModel, j: int) -> tuple[np.ndarray, float]:
    """Return (H_j, gamma_j) with H_j = R~[1:j, 2:j+1] and gamma_j = R~[j+1, j+1].

    For d = 1 these satisfy X Q_j = Q_j H_j + gamma_j q_{j+1} e_j^T.
    """
    if model.d != 1:
        raise ValueError("The Hessenberg relation holds for univariate fits only")
    if not 1 <= j < model.t:
        raise ValueError(f"j must lie in 1..{model.t - 1}, got {j}")
    return model.rtilde[:j, 1 : j + 1].copy(), float(model.rtilde[j, j].real)


def reference_orthogonalization(
    nodes: NodeSet,
    basis: GrevlexBasis,
    cmap: CollocationMap,
    order: int | DerivOrder | None = None,
    passes: int = GS_PASSES,
) -> tuple[np.ndarray, np.ndarray]:
    """G-orthonormalize the exact monomial columns directly (V = Q R).

    The monomial columns are ill-conditioned, so this is only a reference for
    small degrees; the recurrence in :func:`fit` produces the same Q.
    """
    order = cmap.order if order is None else DerivOrder.coerce(order)
    _check_inputs(nodes, basis, cmap, order)
    L = cmap.operator
    V = np.column_stack([monomial_column(alpha, nodes, order) for alpha in basis.indices])
    dtype = np.result_type(V.dtype, cmap.dtype)
    g = basis.g
    Q = np.zeros(V.shape, dtype=dtype)
    LQ = np.zeros((cmap.r, g), dtype=dtype)
    R = np.zeros((g, g), dtype=dtype)
    for i in range(g):
        q = V[:, i].astype(dtype)
        lq = L @ q
        for _ in range(passes):
            proj = LQ[:, :i].conj().T @ lq
            q -= Q[:, :i] @ proj
            R[:i, i] += proj
            lq = L @ q
        R[i, i] = _g_norm_of(lq)
        if R[i, i] == 0.0:
            raise DegenerateMapError(f"Monomial column {i + 1} is G-dependent on earlier columns")
        Q[:, i] = q / R[i, i]
        LQ[:, i] = lq / R[i, i]
    return Q, R
