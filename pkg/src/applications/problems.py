#!/usr/bin/env python3
"""
Least-squares problems over collocation maps.

Each builder returns an ``LsProblem``: a collocation map L (which doubles as
the G-inner product of the fit), the right-hand side b and the node groups
the rows refer to. After fitting with L, the coefficient matrix A = L Q has
G-orthonormal columns and the coefficients are c = A^H b.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np
import scipy.linalg

from ..basis.grevlex import GrevlexBasis, grevlex_basis
from ..basis.stacked import DerivOrder, NodeSet, StackedLayout, monomial_column
from ..collocation.gram import CollocationMap, CollocationRow, CollocationTerm
from ..config.config import runtime_config
from ..fitting.arnoldi import FitModel, fit
from ..fitting.evaluation import StackedOutput, eval_basis
from ..telemetry.events import SolveCompleted
from ..telemetry.pipeline import TelemetryPipeline, publish

logger = logging.getLogger("mvga.applications.problems")

NORMAL_TOL = 1e-12

AlphaLike = Union[float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class LsProblem:
    """min_c || A c - b || with A = L Q for a fitted basis Q.

    ``groups`` maps node-group names to index ranges of ``nodes`` and
    ``row_groups`` maps row-group names to index ranges of the rows.
    """

    cmap: CollocationMap
    rhs: np.ndarray
    nodes: NodeSet
    groups: Mapping[str, range]
    row_groups: Mapping[str, range] = field(default_factory=dict)

    def __post_init__(self) -> None:
        rhs = np.asarray(self.rhs)
        if rhs.ndim != 1 or rhs.shape[0] != self.cmap.r:
            raise ValueError(f"Right-hand side has shape {rhs.shape}, map has {self.cmap.r} rows")
        if not np.all(np.isfinite(rhs)):
            raise ValueError("Right-hand side must be finite")
        object.__setattr__(self, "rhs", rhs)
        if self.nodes.m != self.cmap.m:
            raise ValueError(f"Problem has {self.nodes.m} nodes, map expects {self.cmap.m}")
        covered = sorted(j for r in self.groups.values() for j in r)
        if covered != list(range(self.nodes.m)):
            raise ValueError("Node groups must be disjoint and cover every node")

    @property
    def r(self) -> int:
        return self.cmap.r

    @property
    def order(self) -> DerivOrder:
        return self.cmap.order

    def group_nodes(self, name: str) -> NodeSet:
        return self.nodes.subset(list(self.groups[name]))


@dataclass(frozen=True)
class BoundaryData:
    """Sampled boundary and interior data of a mixed boundary-value problem."""

    normals: np.ndarray
    dirichlet_values: np.ndarray
    neumann_values: np.ndarray
    interior_rhs: np.ndarray

    def __post_init__(self) -> None:
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        if normals.shape[0] != len(self.neumann_values):
            raise ValueError(
                f"Got {normals.shape[0]} normals for {len(self.neumann_values)} Neumann values"
            )
        lengths = np.linalg.norm(normals, axis=1)
        bad = np.flatnonzero(np.abs(lengths - 1.0) > NORMAL_TOL)
        if bad.size:
            raise ValueError(f"Normal at Neumann node {bad[0]} has length {lengths[bad[0]]!r}, expected 1")
        object.__setattr__(self, "normals", normals)


@dataclass(frozen=True)
class CoefficientSolve:
    """Coefficients of a solve plus which path produced them."""

    coeffs: np.ndarray
    path: str
    residual: float


def _values(name: str, values, expected: int) -> np.ndarray:
    arr = np.asarray(values)
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.float64)
    arr = arr.reshape(-1)
    if arr.shape[0] != expected:
        raise ValueError(f"{name} has {arr.shape[0]} entries, expected {expected}")
    return arr


def resolve_alpha(alpha: AlphaLike, nodes: NodeSet) -> np.ndarray:
    """Sample a constant, callable or per-node alpha at the nodes."""
    if callable(alpha):
        values = np.asarray(alpha(nodes.coords))
    elif np.ndim(alpha) == 0:
        values = np.full(nodes.m, alpha, dtype=np.result_type(alpha, np.float64))
    else:
        values = np.asarray(alpha)
    values = _values("alpha", values, nodes.m)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ValueError(f"alpha is not finite at interior node {bad[0]}")
    return values


def _ranges(*sizes: tuple[str, int]) -> dict[str, range]:
    out, start = {}, 0
    for name, size in sizes:
        out[name] = range(start, start + size)
        start += size
    return out


def build_interpolation(nodes: NodeSet, f_values, order: int | DerivOrder = DerivOrder.VALUES) -> LsProblem:
    """One unit-weight function row per node.

    ``order`` sets the stacked layout of the map; the rows only ever touch
    the function block.
    """
    f = _values("f_values", f_values, nodes.m)
    rows = [CollocationRow.single("f", j) for j in range(nodes.m)]
    cmap = CollocationMap(tuple(rows), StackedLayout.for_nodes(nodes, order))
    return LsProblem(cmap, f, nodes, {"interior": range(nodes.m)}, {"f": range(nodes.m)})


def build_hermite(
    interior: NodeSet,
    boundary: NodeSet | None,
    f_values,
    *boundary_partials,
) -> LsProblem:
    """Hermite least squares: values everywhere, first partials on the boundary.

    Rows are the m function rows (interior nodes then boundary nodes),
    followed by one group of boundary rows per coordinate direction.
    ``boundary_partials`` holds one array per coordinate.
    """
    d = interior.d
    if boundary is None:
        if boundary_partials:
            raise ValueError("Boundary partials given without boundary nodes")
        nodes, m1 = interior, 0
    else:
        if len(boundary_partials) != d:
            raise ValueError(f"Expected {d} boundary partial arrays, got {len(boundary_partials)}")
        nodes, m1 = NodeSet.concatenate(interior, boundary), boundary.m
    m0 = interior.m
    f = _values("f_values", f_values, nodes.m)
    partials = [_values(f"df{k + 1}_boundary", p, m1) for k, p in enumerate(boundary_partials)]

    rows = [CollocationRow.single("f", j) for j in range(nodes.m)]
    for k in range(len(partials)):
        rows += [CollocationRow.single(f"d{k + 1}", m0 + j) for j in range(m1)]
    cmap = CollocationMap(tuple(rows), StackedLayout.for_nodes(nodes, DerivOrder.FIRST))
    rhs = np.concatenate([f, *partials]) if partials else f
    row_groups = _ranges(("f", nodes.m), *[(f"d{k + 1}", m1) for k in range(len(partials))])
    groups = {"interior": range(m0)}
    if m1:
        groups["boundary"] = range(m0, m0 + m1)
    return LsProblem(cmap, rhs, nodes, groups, row_groups)


def _operator_rows(layout: StackedLayout, alpha: np.ndarray) -> list[CollocationRow]:
    """Rows of u + alpha * Lap(u) at the first len(alpha) nodes."""
    lap_blocks = [layout.names[layout.hessian_block(k, k)] for k in range(layout.d)]
    rows = []
    for j, a in enumerate(alpha):
        terms = [CollocationTerm("f", j, 1.0)]
        terms += [CollocationTerm(name, j, a) for name in lap_blocks]
        rows.append(CollocationRow(tuple(terms)))
    return rows


def build_poisson_dirichlet(
    interior: NodeSet,
    boundary: NodeSet,
    alpha: AlphaLike,
    f_values,
    h_values,
) -> LsProblem:
    """u + alpha Lap(u) = f inside, u = h on the boundary."""
    nodes = NodeSet.concatenate(interior, boundary)
    m0, m1 = interior.m, boundary.m
    layout = StackedLayout.for_nodes(nodes, DerivOrder.SECOND)
    a = resolve_alpha(alpha, interior)
    f = _values("f_values", f_values, m0)
    h = _values("h_values", h_values, m1)

    rows = _operator_rows(layout, a)
    rows += [CollocationRow.single("f", m0 + j) for j in range(m1)]
    return LsProblem(
        CollocationMap(tuple(rows), layout),
        np.concatenate([f, h]),
        nodes,
        _ranges(("interior", m0), ("dirichlet", m1)),
        _ranges(("interior", m0), ("dirichlet", m1)),
    )


def build_poisson_mixed(
    interior: NodeSet,
    dirichlet: NodeSet,
    neumann: NodeSet,
    normals,
    alpha: AlphaLike,
    f_values,
    h1_values,
    h2_values,
) -> LsProblem:
    """u + alpha Lap(u) = f inside, u = h1 on the Dirichlet part, grad(u).n = h2 on the Neumann part."""
    nodes = NodeSet.concatenate(interior, dirichlet, neumann)
    m0, md, mn = interior.m, dirichlet.m, neumann.m
    layout = StackedLayout.for_nodes(nodes, DerivOrder.SECOND)
    data = BoundaryData(
        normals=normals,
        dirichlet_values=_values("h1_values", h1_values, md),
        neumann_values=_values("h2_values", h2_values, mn),
        interior_rhs=_values("f_values", f_values, m0),
    )
    if data.normals.shape[1] != nodes.d:
        raise ValueError(f"Normals are {data.normals.shape[1]}-dimensional, nodes are {nodes.d}-dimensional")
    a = resolve_alpha(alpha, interior)

    rows = _operator_rows(layout, a)
    rows += [CollocationRow.single("f", m0 + j) for j in range(md)]
    offset = m0 + md
    for j, nrm in enumerate(data.normals):
        terms = tuple(CollocationTerm(f"d{k + 1}", offset + j, float(nrm[k])) for k in range(nodes.d))
        rows.append(CollocationRow(terms))
    return LsProblem(
        CollocationMap(tuple(rows), layout),
        np.concatenate([data.interior_rhs, data.dirichlet_values, data.neumann_values]),
        nodes,
        _ranges(("interior", m0), ("dirichlet", md), ("neumann", mn)),
        _ranges(("interior", m0), ("dirichlet", md), ("neumann", mn)),
    )


def fit_problem(
    problem: LsProblem,
    n: int | GrevlexBasis,
    *,
    keep_q: bool = True,
    telemetry: TelemetryPipeline | None = None,
) -> FitModel:
    """Fit the degree-n basis with the problem's map as the G-inner product."""
    basis = n if isinstance(n, GrevlexBasis) else grevlex_basis(problem.nodes.d, n)
    return fit(problem.nodes, basis, problem.cmap, keep_q=keep_q, telemetry=telemetry)


def _map_columns(cmap: CollocationMap, columns: np.ndarray, workers: int) -> np.ndarray:
    L = cmap.operator
    t = columns.shape[1]
    if workers <= 1 or t < 2 * workers:
        return np.asarray(L @ columns)
    chunks = [c for c in np.array_split(np.arange(t), workers) if c.size]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda cols: np.asarray(L @ columns[:, cols]), chunks))
    return np.hstack(parts)


def least_squares_matrix(model: FitModel, problem: LsProblem, workers: int | None = None) -> np.ndarray:
    """A = L Q, rebuilding Q at the fitting nodes when it was discarded."""
    if workers is None:
        workers = runtime_config.settings().threads
    if model.q is not None and model.cmap.layout == problem.cmap.layout:
        Q = model.q
    else:
        Q = eval_basis(model, problem.nodes, problem.order, workers=workers).E
    return _map_columns(problem.cmap, Q, workers)


def _orthogonality_residual(A: np.ndarray, c: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(A.conj().T @ (A @ c - b)), initial=0.0))


def solve_coefficients(
    model: FitModel,
    problem: LsProblem,
    *,
    tol: float | None = None,
    telemetry: TelemetryPipeline | None = None,
) -> CoefficientSolve:
    """Solve min ||A c - b|| for the fitted model.

    The primary path is c = A^H b. When ||A^H (A c - b)||_inf exceeds
    tol * ||b||_inf the system is re-solved by pivoted QR least squares.
    """
    if model.cmap.r != problem.r:
        raise ValueError(f"Model was fitted with {model.cmap.r} map rows, problem has {problem.r}")
    if model.nodes.m != problem.nodes.m:
        raise ValueError(f"Model was fitted on {model.nodes.m} nodes, problem has {problem.nodes.m}")
    if tol is None:
        tol = runtime_config.settings().solve_tol

    started = time.perf_counter()
    A = least_squares_matrix(model, problem)
    b = problem.rhs
    c = A.conj().T @ b
    residual = _orthogonality_residual(A, c, b)
    path = "orthonormal"
    b_norm = float(np.max(np.abs(b), initial=0.0))
    if residual > tol * b_norm:
        logger.warning(
            "Orthonormal solve residual %.3e exceeds %.1e * ||b||; falling back to dense QR",
            residual, tol,
        )
        c = scipy.linalg.lstsq(A, b, lapack_driver="gelsy")[0]
        residual = _orthogonality_residual(A, c, b)
        path = "dense_qr"

    duration = time.perf_counter() - started
    logger.debug("Solved %d x %d system via %s (residual %.3e)", A.shape[0], A.shape[1], path, residual)
    publish(telemetry, SolveCompleted(path=path, rows=problem.r, t=model.t,
                                      orthogonality_residual=residual, duration_s=duration))
    return CoefficientSolve(coeffs=c, path=path, residual=residual)


def monomial_least_squares(
    problem: LsProblem,
    basis: GrevlexBasis,
    new_nodes: NodeSet,
    order: int | DerivOrder | None = None,
) -> StackedOutput:
    """Solve the same problem in the monomial basis and evaluate at new nodes.

    Dense and ill-conditioned for larger degrees; used as an independent
    check on small instances.
    """
    order = problem.order if order is None else DerivOrder.coerce(order)
    V = np.column_stack([monomial_column(a, problem.nodes, problem.order) for a in basis.indices])
    LV = np.asarray(problem.cmap.operator @ V)
    coeffs = scipy.linalg.lstsq(LV, problem.rhs)[0]
    W = np.column_stack([monomial_column(a, new_nodes, order) for a in basis.indices])
    return StackedOutput.from_stacked(W @ coeffs, new_nodes, order)

