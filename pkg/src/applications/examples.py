#!/usr/bin/env python3
"""
Named end-to-end examples: Hermite least squares on the disk, derivative
recovery from Padua interpolation, and the Poisson solvers on the
ellipse-minus-disk domain.

Each run builds its nodes deterministically, fits, solves, evaluates and
returns metrics plus plot-ready tables.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..basis.stacked import DerivOrder, NodeSet
from ..fitting.arnoldi import FitModel, gram_check
from ..fitting.evaluation import eval_poly
from ..telemetry.pipeline import TelemetryPipeline
from .geometry import Disk, EllipseMinusDisk, domain_nodes, grid_nodes, padua_nodes
from .problems import (
    AlphaLike,
    LsProblem,
    build_hermite,
    build_interpolation,
    build_poisson_dirichlet,
    build_poisson_mixed,
    fit_problem,
    resolve_alpha,
    solve_coefficients,
)
from .testfunctions import get_test_function, neg_gaussian

logger = logging.getLogger("mvga.applications.examples")

# Interior jitter (fraction of the lattice spacing) applied when a seed is given.
SEEDED_JITTER = 0.1

CONVERGENCE_DEGREES = (6, 10, 14, 18, 22)


@dataclass
class ExampleResult:
    """Outcome of one example run.

    ``tables`` maps a table name to (header, rows) for CSV output.
    """

    name: str
    model: FitModel
    problem: LsProblem
    metrics: dict = field(default_factory=dict)
    tables: dict[str, tuple[list[str], np.ndarray]] = field(default_factory=dict)


def _solve(problem: LsProblem, n: int, telemetry: TelemetryPipeline | None) -> tuple[FitModel, dict]:
    started = time.perf_counter()
    model = fit_problem(problem, n, telemetry=telemetry)
    solved = solve_coefficients(model, problem, telemetry=telemetry)
    model = model.with_coeffs(solved.coeffs)
    metrics = {
        "t": model.t,
        "g": model.g,
        "r": problem.r,
        "m": problem.nodes.m,
        "breakdown": model.breakdown,
        "gram_deviation": gram_check(model),
        "solve_path": solved.path,
        "orthogonality_residual": solved.residual,
        "runtime_ms": 1000 * (time.perf_counter() - started),
    }
    return model, metrics


def _node_table(problem: LsProblem) -> tuple[list[str], np.ndarray]:
    labels = np.empty(problem.nodes.m)
    for index, rows in enumerate(problem.groups.values()):
        labels[list(rows)] = index
    return ["x1", "x2", "group"], np.column_stack([problem.nodes.coords, labels])


def _jitter(seed: int | None) -> dict:
    return {"jitter": SEEDED_JITTER, "seed": seed} if seed is not None else {}


def hermite_sin(*, seed: int | None = None, telemetry: TelemetryPipeline | None = None) -> ExampleResult:
    """Hermite LS of sin(x1 x2) on the unit disk, degree 10, checked on ~560 refined nodes."""
    fn = get_test_function("sin_xy")
    interior, boundary, _ = domain_nodes(Disk(), 120, 42, **_jitter(seed))
    x = np.vstack([interior.coords, boundary.coords])
    grad = fn.gradient(boundary.coords)
    problem = build_hermite(interior, boundary, fn.value(x), grad[:, 0], grad[:, 1])
    model, metrics = _solve(problem, 10, telemetry)

    refined = domain_nodes(Disk(), 560, 60).interior
    p = eval_poly(model, refined, DerivOrder.VALUES, telemetry=telemetry).fun
    err = p - fn.value(refined.coords)
    metrics["max_error"] = float(np.max(np.abs(err)))
    metrics["eval_nodes"] = refined.m
    return ExampleResult(
        "hermite_sin", model, problem, metrics,
        {
            "fit_nodes": _node_table(problem),
            "errors": (["x1", "x2", "p", "f", "error"],
                       np.column_stack([refined.coords, p, fn.value(refined.coords), err])),
        },
    )


def padua_laplace(*, seed: int | None = None, telemetry: TelemetryPipeline | None = None) -> ExampleResult:
    """Degree-32 Padua interpolation; interpolant, div and Laplacian errors on a 41 x 41 grid."""
    fn = get_test_function("gaussian_quadratic")
    nodes = padua_nodes(32)
    problem = build_interpolation(nodes, fn.value(nodes.coords))
    model, metrics = _solve(problem, 32, telemetry)

    grid = grid_nodes(41)
    out = eval_poly(model, grid, DerivOrder.SECOND, telemetry=telemetry)
    interp_err = out.fun - fn.value(grid.coords)
    div_err = out.divergence() - fn.divergence(grid.coords)
    lap_err = out.laplacian() - fn.laplacian(grid.coords)
    metrics["max_error_interp"] = float(np.max(np.abs(interp_err)))
    metrics["max_error_div"] = float(np.max(np.abs(div_err)))
    metrics["max_error_laplacian"] = float(np.max(np.abs(lap_err)))
    metrics["max_error"] = max(metrics["max_error_div"], metrics["max_error_laplacian"])
    metrics["eval_nodes"] = grid.m
    return ExampleResult(
        "padua_laplace", model, problem, metrics,
        {
            "fit_nodes": _node_table(problem),
            "errors": (["x1", "x2", "p", "div_p", "lap_p", "interp_error", "div_error", "lap_error"],
                       np.column_stack([grid.coords, out.fun, out.divergence(), out.laplacian(),
                                        interp_err, div_err, lap_err])),
        },
    )


def _dirichlet_problem(alpha: AlphaLike, fn_name: str, interior: NodeSet, boundary: NodeSet) -> LsProblem:
    fn = get_test_function(fn_name)
    a = resolve_alpha(alpha, interior)
    return build_poisson_dirichlet(
        interior, boundary, a, fn.poisson_rhs(interior.coords, a), fn.value(boundary.coords)
    )


def _solution_table(problem: LsProblem, p: np.ndarray, err: np.ndarray, label: str) -> tuple[list[str], np.ndarray]:
    return ["x1", "x2", "p", label], np.column_stack([problem.nodes.coords, p, err])


def poisson_dirichlet(
    *,
    n: int = 22,
    seed: int | None = None,
    telemetry: TelemetryPipeline | None = None,
) -> ExampleResult:
    """u + alpha Lap(u) = f with u = exp(x1 + x2/2), alpha = -0.1, Dirichlet data."""
    interior, boundary, _ = domain_nodes(EllipseMinusDisk(), 504, 126, **_jitter(seed))
    problem = _dirichlet_problem(-0.1, "exp_linear", interior, boundary)
    model, metrics = _solve(problem, n, telemetry)

    p = eval_poly(model, problem.nodes, DerivOrder.VALUES, telemetry=telemetry).fun
    err = p - get_test_function("exp_linear").value(problem.nodes.coords)
    metrics["max_error"] = float(np.max(np.abs(err)))
    return ExampleResult(
        "poisson_dirichlet", model, problem, metrics,
        {"fit_nodes": _node_table(problem), "solution": _solution_table(problem, p, err, "error")},
    )


def poisson_variable(*, seed: int | None = None, telemetry: TelemetryPipeline | None = None) -> ExampleResult:
    """alpha(x) = -exp(-|x|^2), f = 1, h = 0, degree 40 on ~4000 nodes; reports the residual."""
    interior, boundary, _ = domain_nodes(EllipseMinusDisk(), 3650, 331, **_jitter(seed))
    alpha = resolve_alpha(neg_gaussian, interior)
    problem = build_poisson_dirichlet(interior, boundary, alpha, np.ones(interior.m), np.zeros(boundary.m))
    model, metrics = _solve(problem, 40, telemetry)

    out = eval_poly(model, problem.nodes, DerivOrder.SECOND, telemetry=telemetry)
    m0 = interior.m
    residual = np.concatenate([
        out.fun[:m0] + alpha * out.laplacian()[:m0] - 1.0,
        out.fun[m0:],
    ])
    metrics["residual_inf"] = float(np.max(np.abs(residual)))
    metrics["interior_residual_inf"] = float(np.max(np.abs(residual[:m0])))
    return ExampleResult(
        "poisson_variable", model, problem, metrics,
        {"fit_nodes": _node_table(problem), "solution": _solution_table(problem, out.fun, residual, "residual")},
    )


def poisson_mixed(*, seed: int | None = None, telemetry: TelemetryPipeline | None = None) -> ExampleResult:
    """Mixed problem with u = sin(x1 x2): Dirichlet on the inner circle, Neumann on the ellipse."""
    fn = get_test_function("sin_xy")
    domain = EllipseMinusDisk()
    nodes = domain_nodes(domain, 504, (96, 30), **_jitter(seed))
    neumann, normals = nodes.boundary_group(0)
    dirichlet, _ = nodes.boundary_group(1)
    interior = nodes.interior
    alpha = resolve_alpha(neg_gaussian, interior)
    problem = build_poisson_mixed(
        interior, dirichlet, neumann, normals, alpha,
        fn.poisson_rhs(interior.coords, alpha),
        fn.value(dirichlet.coords),
        fn.normal_derivative(neumann.coords, normals),
    )
    model, metrics = _solve(problem, 22, telemetry)

    p = eval_poly(model, problem.nodes, DerivOrder.VALUES, telemetry=telemetry).fun
    err = p - fn.value(problem.nodes.coords)
    metrics["max_error"] = float(np.max(np.abs(err)))
    return ExampleResult(
        "poisson_mixed", model, problem, metrics,
        {"fit_nodes": _node_table(problem), "solution": _solution_table(problem, p, err, "error")},
    )


EXAMPLES: dict[str, Callable[..., ExampleResult]] = {
    "hermite_sin": hermite_sin,
    "padua_laplace": padua_laplace,
    "poisson_dirichlet": poisson_dirichlet,
    "poisson_variable": poisson_variable,
    "poisson_mixed": poisson_mixed,
}


def run_example(
    name: str,
    *,
    seed: int | None = None,
    telemetry: TelemetryPipeline | None = None,
) -> ExampleResult:
    try:
        runner = EXAMPLES[name]
    except KeyError:
        raise ValueError(f"Unknown example '{name}'; known: {sorted(EXAMPLES)}") from None
    logger.info("Running example %s", name)
    result = runner(seed=seed, telemetry=telemetry)
    logger.info("Example %s finished: %s", name, result.metrics)
    return result


def convergence_study(
    degrees: Sequence[int] = CONVERGENCE_DEGREES,
    *,
    telemetry: TelemetryPipeline | None = None,
) -> list[tuple[int, float]]:
    """Max error at the fitting nodes of the Dirichlet example for each degree.

    The nodes are generated once and shared by every degree.
    """
    interior, boundary, _ = domain_nodes(EllipseMinusDisk(), 504, 126)
    problem = _dirichlet_problem(-0.1, "exp_linear", interior, boundary)
    exact = get_test_function("exp_linear").value(problem.nodes.coords)
    errors = []
    for n in degrees:
        model, _ = _solve(problem, n, telemetry)
        p = eval_poly(model, problem.nodes, DerivOrder.VALUES).fun
        errors.append((n, float(np.max(np.abs(p - exact)))))
        logger.debug("Convergence n=%d: max error %.3e", n, errors[-1][1])
    return errors
