#!/usr/bin/env python3
"""
Evaluation stage: rebuild the discrete G-orthogonal basis at new nodes.

Only R~ and the parent table are needed:

    R~[i,i] xi_i(x) = X_{u_i} xi_{s_i}(x) - sum_{k<i} R~[k,i] xi_k(x)

and p(S) = E c stacks the values and partials of the fitted polynomial.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..basis.stacked import DerivOrder, NodeSet, StackedLayout, apply_shift, block_names, constant_column
from ..config.config import runtime_config
from ..errors import DimensionMismatchError, FitError, MissingCoefficientsError
from ..telemetry.events import EvaluationCompleted
from ..telemetry.pipeline import TelemetryPipeline, publish
from .arnoldi import FitModel

logger = logging.getLogger("mvga.fitting.evaluation")

EXTRAPOLATION_MARGIN = 0.10


@dataclass(frozen=True)
class StackedOutput:
    """Values and partials of a polynomial at m_hat nodes.

    ``grad`` has shape (d, m_hat) and ``hess`` (d(d+1)/2, m_hat) in the
    upper-triangular row-major pair order; each is None when the order
    does not carry it.
    """

    nodes: NodeSet
    order: DerivOrder
    fun: np.ndarray
    grad: np.ndarray | None = None
    hess: np.ndarray | None = None

    @classmethod
    def from_stacked(cls, values: np.ndarray, nodes: NodeSet, order: DerivOrder) -> StackedOutput:
        layout = StackedLayout.for_nodes(nodes, order)
        blocks = layout.blocks(values)
        d = nodes.d
        return cls(
            nodes=nodes,
            order=layout.order,
            fun=blocks[0].copy(),
            grad=blocks[1 : 1 + d].copy() if layout.order >= DerivOrder.FIRST else None,
            hess=blocks[1 + d :].copy() if layout.order >= DerivOrder.SECOND else None,
        )

    def stacked(self) -> np.ndarray:
        parts = [self.fun[None, :]]
        if self.grad is not None:
            parts.append(self.grad)
        if self.hess is not None:
            parts.append(self.hess)
        return np.vstack(parts).reshape(-1)

    def columns(self) -> list[str]:
        return block_names(self.nodes.d, self.order)

    def table(self) -> np.ndarray:
        """m_hat x (d + d_tilde) array: coordinates followed by the stacked blocks."""
        blocks = self.stacked().reshape(-1, self.nodes.m).T
        return np.hstack([self.nodes.coords, blocks])

    def hessian_entry(self, j: int, k: int) -> np.ndarray:
        if self.hess is None:
            raise ValueError("Second partials were not evaluated")
        layout = StackedLayout.for_nodes(self.nodes, self.order)
        return self.hess[layout.hessian_block(j, k) - 1 - self.nodes.d]

    def divergence(self) -> np.ndarray:
        """Sum of the first partials."""
        if self.grad is None:
            raise ValueError("First partials were not evaluated")
        return self.grad.sum(axis=0)

    def laplacian(self) -> np.ndarray:
        """Sum of the pure second partials."""
        return sum(self.hessian_entry(j, j) for j in range(self.nodes.d))


@dataclass(frozen=True)
class EvalTable:
    """Basis functions xi_1..xi_t evaluated (with partials) at new nodes."""

    E: np.ndarray
    new_nodes: NodeSet
    order: DerivOrder

    @property
    def t(self) -> int:
        return self.E.shape[1]

    def combine(self, coeffs: np.ndarray) -> StackedOutput:
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.t,):
            raise ValueError(f"Expected {self.t} coefficients, got shape {coeffs.shape}")
        return StackedOutput.from_stacked(self.E @ coeffs, self.new_nodes, self.order)


def _check_model(model: FitModel, new_nodes: NodeSet) -> None:
    if new_nodes.d != model.d:
        raise DimensionMismatchError(f"Model is {model.d}-dimensional, nodes are {new_nodes.d}-dimensional")
    if model.t < 1:
        raise FitError("Model has no basis columns")
    diag = np.diag(model.rtilde)
    if np.any(diag.real <= 0) or np.any(diag.imag != 0):
        raise FitError("R~ must have a strictly positive diagonal")


def extrapolation_check(model: FitModel, new_nodes: NodeSet, margin: float = EXTRAPOLATION_MARGIN) -> bool:
    """Warn and return True when new nodes leave the fitting bounding box by more than margin * width."""
    fit_coords = model.nodes.coords.real
    lo, hi = fit_coords.min(axis=0), fit_coords.max(axis=0)
    slack = margin * (hi - lo)
    coords = new_nodes.coords.real
    outside = np.any((coords < lo - slack) | (coords > hi + slack))
    if outside:
        logger.warning(
            "Evaluation nodes extend more than %.0f%% beyond the fitting bounding box; "
            "extrapolated values may be inaccurate",
            100 * margin,
        )
    return bool(outside)


def _recurrence(
    model: FitModel,
    nodes: NodeSet,
    order: DerivOrder,
    coeffs: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    R = model.rtilde
    t = model.t
    parent_s, parent_u = model.parents()
    dtype = np.result_type(nodes.coords.dtype, R.dtype, np.float64)
    layout = StackedLayout.for_nodes(nodes, order)
    E = np.zeros((layout.size, t), dtype=dtype, order="F")
    E[:, 0] = constant_column(nodes, order, dtype=dtype) / R[0, 0]
    acc = None if coeffs is None else coeffs[0] * E[:, 0]
    for i in range(1, t):
        col = apply_shift(parent_u[i], E[:, parent_s[i]], nodes, order)
        col -= E[:, :i] @ R[:i, i]
        E[:, i] = col / R[i, i]
        if acc is not None:
            acc = acc + coeffs[i] * E[:, i]
    return E, acc


def _chunks(m: int, workers: int) -> list[np.ndarray]:
    workers = max(1, min(workers, m))
    return [c for c in np.array_split(np.arange(m), workers) if c.size]


def _evaluate(
    model: FitModel,
    new_nodes: NodeSet,
    order: DerivOrder,
    workers: int,
    coeffs: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray | None]:
    if workers <= 1 or new_nodes.m < 2 * workers:
        return _recurrence(model, new_nodes, order, coeffs)

    # Rows at different nodes never interact, so node chunks run independently.
    chunks = _chunks(new_nodes.m, workers)
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda rows: _recurrence(model, new_nodes.subset(rows), order, coeffs), chunks))

    dt = StackedLayout.for_nodes(new_nodes, order).d_tilde
    t = model.t
    E = np.concatenate([p[0].reshape(dt, -1, t) for p in parts], axis=1).reshape(-1, t)
    acc = None
    if coeffs is not None:
        acc = np.concatenate([p[1].reshape(dt, -1) for p in parts], axis=1).reshape(-1)
    return E, acc


def eval_basis(
    model: FitModel,
    new_nodes: NodeSet,
    order: int | DerivOrder | None = None,
    *,
    workers: int | None = None,
    telemetry: TelemetryPipeline | None = None,
) -> EvalTable:
    """Evaluate xi_1..xi_t and their partials at new nodes.

    ``order`` defaults to the fitting order and may exceed it: the
    recurrence holds for the functions themselves, so their partials follow
    from the product rule regardless of what the fit carried.
    """
    order = model.order if order is None else DerivOrder.coerce(order)
    _check_model(model, new_nodes)
    if workers is None:
        workers = runtime_config.settings().threads
    started = time.perf_counter()
    extrapolating = extrapolation_check(model, new_nodes)
    E, _ = _evaluate(model, new_nodes, order, workers, None)
    publish(telemetry, EvaluationCompleted(nodes=new_nodes.m, t=model.t, order=int(order),
                                           extrapolating=extrapolating,
                                           duration_s=time.perf_counter() - started))
    return EvalTable(E=E, new_nodes=new_nodes, order=order)


def eval_poly(
    model: FitModel,
    new_nodes: NodeSet,
    order: int | DerivOrder | None = None,
    *,
    streaming: bool = False,
    workers: int | None = None,
    telemetry: TelemetryPipeline | None = None,
) -> StackedOutput:
    """Evaluate p = sum c_j xi_j and its partials at new nodes.

    With ``streaming`` the combination is folded column by column instead of
    forming E c at the end.
    """
    if model.coeffs is None:
        raise MissingCoefficientsError("The model has no coefficient vector; solve for coefficients first")
    order = model.order if order is None else DerivOrder.coerce(order)
    if not streaming:
        return eval_basis(model, new_nodes, order, workers=workers, telemetry=telemetry).combine(model.coeffs)

    _check_model(model, new_nodes)
    if workers is None:
        workers = runtime_config.settings().threads
    started = time.perf_counter()
    extrapolating = extrapolation_check(model, new_nodes)
    _, acc = _evaluate(model, new_nodes, order, workers, model.coeffs)
    publish(telemetry, EvaluationCompleted(nodes=new_nodes.m, t=model.t, order=int(order),
                                           extrapolating=extrapolating,
                                           duration_s=time.perf_counter() - started))
    return StackedOutput.from_stacked(acc, new_nodes, order)


def monomial_coefficients(model: FitModel) -> np.ndarray:
    """Expand xi_1..xi_t over the monomial basis.

    Returns a g x t matrix C with xi_j = sum_k C[k, j] phi_k. C is upper
    triangular; for t = g its inverse is the R of V = Q R.
    """
    basis = model.basis
    pos = basis.position()
    exps = basis.exponent_matrix()
    R = model.rtilde
    parent_s, parent_u = model.parents()
    C = np.zeros((basis.g, model.t), dtype=R.dtype)
    C[0, 0] = 1.0 / R[0, 0]
    for i in range(1, model.t):
        s, u = parent_s[i], parent_u[i]
        shifted = np.zeros(basis.g, dtype=R.dtype)
        for k in np.flatnonzero(C[:, s]):
            target = list(exps[k])
            target[u] += 1
            shifted[pos[tuple(target)]] += C[k, s]
        C[:, i] = (shifted - C[:, :i] @ R[:i, i]) / R[i, i]
    return C
