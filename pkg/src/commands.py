#!/usr/bin/env python3
"""
Sub-command implementations for the mvga CLI.

Each ``cmd_*`` takes the parsed arguments, writes its outputs atomically and
returns the process exit code. Errors propagate to ``main``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .applications.examples import run_example
from .applications.geometry import domain_nodes, get_domain
from .applications.problems import (
    LsProblem,
    build_hermite,
    build_interpolation,
    build_poisson_dirichlet,
    build_poisson_mixed,
    fit_problem,
    solve_coefficients,
)
from .applications.testfunctions import TestFunction, get_test_function
from .basis.grevlex import grevlex_basis
from .basis.stacked import DerivOrder, NodeSet, StackedLayout
from .collocation.gram import selection_map
from .config.models import ProblemSpec
from .config.parsing import load_problem_spec
from .fitting.arnoldi import FitModel, fit, gram_check
from .fitting.evaluation import eval_poly
from .fitting.serialization import output_csv, read_matrix_csv, read_model, write_csv, write_model
from .telemetry.events import FitCompleted
from .telemetry.pipeline import TelemetryPipeline, build_default_pipeline
from .telemetry.sinks.inmemory import InMemorySink
from .utils import atomic_write_text, write_json

logger = logging.getLogger("mvga.commands")


@dataclass(frozen=True)
class BuiltProblem:
    """A problem plus what is needed to measure its solution."""

    problem: LsProblem
    exact: TestFunction | None = None
    alpha: np.ndarray | None = None
    interior_rhs: np.ndarray | None = None


def _read_values(path: Path) -> np.ndarray:
    values = read_matrix_csv(path)
    if values.shape[1] != 1:
        raise ValueError(f"{path} must have exactly one column of values, found {values.shape[1]}")
    return values[:, 0]


def build_problem(spec: ProblemSpec) -> BuiltProblem:
    """Generate nodes and data for a problem specification and assemble it."""
    fn = get_test_function(spec.function) if spec.function else None

    if spec.nodes_path is not None:
        nodes = NodeSet(read_matrix_csv(spec.nodes_path))
        values = _read_values(spec.values_path) if spec.values_path else fn.value(nodes.coords)
        return BuiltProblem(build_interpolation(nodes, values, spec.order), exact=fn)

    if fn is None:
        raise ValueError("Generated-domain problems need a test 'function'")
    dom = spec.domain
    params = {"vertices": dom.vertices} if dom.kind == "polygon" else {}
    generated = domain_nodes(
        get_domain(dom.kind, **params), dom.interior, dom.boundary, jitter=dom.jitter, seed=spec.seed
    )
    interior, boundary = generated.interior, generated.boundary

    if spec.app == "interpolation":
        nodes = NodeSet.concatenate(interior, boundary)
        return BuiltProblem(build_interpolation(nodes, fn.value(nodes.coords), spec.order), exact=fn)

    if spec.app == "hermite":
        x = np.vstack([interior.coords, boundary.coords])
        grad = fn.gradient(boundary.coords)
        partials = [grad[:, k] for k in range(boundary.d)]
        return BuiltProblem(build_hermite(interior, boundary, fn.value(x), *partials), exact=fn)

    alpha = spec.alpha.sample(interior.coords)
    f = fn.poisson_rhs(interior.coords, alpha)
    if spec.app == "poisson_dirichlet":
        problem = build_poisson_dirichlet(interior, boundary, alpha, f, fn.value(boundary.coords))
        return BuiltProblem(problem, exact=fn, alpha=alpha, interior_rhs=f)

    on_neumann = generated.curve == spec.neumann_curve
    if on_neumann.all() or not on_neumann.any():
        raise ValueError(
            f"Mixed problems need Dirichlet and Neumann parts; curve {spec.neumann_curve} "
            f"of domain '{dom.kind}' does not split the boundary"
        )
    neumann = boundary.subset(np.flatnonzero(on_neumann))
    dirichlet = boundary.subset(np.flatnonzero(~on_neumann))
    normals = generated.normals[on_neumann]
    problem = build_poisson_mixed(
        interior, dirichlet, neumann, normals, alpha, f,
        fn.value(dirichlet.coords), fn.normal_derivative(neumann.coords, normals),
    )
    return BuiltProblem(problem, exact=fn, alpha=alpha, interior_rhs=f)


def _load_spec(args: argparse.Namespace) -> ProblemSpec:
    spec = load_problem_spec(args.problem)
    if getattr(args, "alpha", None) is not None:
        spec = replace(spec, alpha=args.alpha)
    if getattr(args, "seed", None) is not None:
        spec = replace(spec, seed=args.seed)
    if getattr(args, "order", None) is not None:
        spec = replace(spec, order=args.order)
    return spec


def _fit_metrics(model: FitModel, r: int, sink: InMemorySink) -> dict:
    metrics = {
        "t": model.t,
        "g": model.g,
        "r": r,
        "m": model.nodes.m,
        "breakdown": model.breakdown,
        "gram_deviation": gram_check(model),
    }
    fits = sink.of_type(FitCompleted)
    if fits:
        metrics["runtime_ms"] = 1000 * fits[-1].duration_s
    return metrics


def _report_breakdown(model: FitModel) -> None:
    if model.breakdown is not None:
        print(
            f"NOTICE: breakdown at column {model.breakdown}; continuing with t={model.t} of g={model.g}",
            file=sys.stderr,
        )


def _telemetry() -> tuple[TelemetryPipeline, InMemorySink]:
    sink = InMemorySink()
    return build_default_pipeline(sink), sink


def cmd_basis(args: argparse.Namespace) -> int:
    basis = grevlex_basis(args.dim, args.degree)
    summary = basis.to_dict()
    print(json.dumps(summary, separators=(",", ":")))
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    telemetry, sink = _telemetry()
    if args.problem is not None:
        spec = _load_spec(args)
        problem = build_problem(spec).problem
        n = spec.degree if args.degree is None else args.degree
        model = fit_problem(problem, n, telemetry=telemetry)
        cmap = problem.cmap
    else:
        nodes = NodeSet(read_matrix_csv(args.nodes))
        order = DerivOrder.coerce(args.order or 0)
        problem = build_interpolation(nodes, _read_values(args.values), order) if args.values else None
        cmap = problem.cmap if problem else selection_map(
            StackedLayout.for_nodes(nodes, order), [("f", range(nodes.m))]
        )
        model = fit(nodes, grevlex_basis(nodes.d, args.degree), cmap, telemetry=telemetry)
    _report_breakdown(model)

    metrics = _fit_metrics(model, cmap.r, sink)
    if problem is not None:
        solved = solve_coefficients(model, problem, telemetry=telemetry)
        model = model.with_coeffs(solved.coeffs)
        metrics["solve_path"] = solved.path

    write_model(model, args.out / "model.json", hex_floats=args.hex_floats)
    write_json(args.out / "metrics.json", metrics)
    print(json.dumps({k: metrics[k] for k in ("t", "g", "gram_deviation")}))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    telemetry, _ = _telemetry()
    model = read_model(args.model)
    nodes = NodeSet(read_matrix_csv(args.nodes))
    output = eval_poly(model, nodes, args.order, telemetry=telemetry)
    path = atomic_write_text(args.out / "eval.csv", output_csv(output, args.hex_floats))
    logger.info("Wrote %d evaluations to %s", nodes.m, path)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    telemetry, sink = _telemetry()
    spec = _load_spec(args)
    built = build_problem(spec)
    problem = built.problem
    model = fit_problem(problem, spec.degree if args.degree is None else args.degree, telemetry=telemetry)
    _report_breakdown(model)
    solved = solve_coefficients(model, problem, telemetry=telemetry)
    model = model.with_coeffs(solved.coeffs)

    metrics = _fit_metrics(model, problem.r, sink)
    metrics["solve_path"] = solved.path
    metrics["orthogonality_residual"] = solved.residual
    output = eval_poly(model, problem.nodes, spec.order, telemetry=telemetry)
    if built.exact is not None:
        metrics["max_error"] = float(np.max(np.abs(output.fun - built.exact.value(problem.nodes.coords))))
    if built.alpha is not None:
        m0 = len(problem.groups["interior"])
        residual = output.fun[:m0] + built.alpha * output.laplacian()[:m0] - built.interior_rhs
        metrics["residual_inf"] = float(np.max(np.abs(residual)))

    write_model(model, args.out / "model.json", hex_floats=args.hex_floats)
    atomic_write_text(args.out / "eval.csv", output_csv(output, args.hex_floats))
    write_json(args.out / "metrics.json", metrics)
    print(json.dumps(metrics))
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    telemetry, _ = _telemetry()
    result = run_example(args.example, seed=args.seed, telemetry=telemetry)
    write_model(result.model, args.out / "model.json", hex_floats=args.hex_floats)
    for name, (header, rows) in result.tables.items():
        write_csv(args.out / f"{name}.csv", header, rows, hex_floats=args.hex_floats)
    metrics = {"example": result.name, "seed": args.seed, **result.metrics}
    write_json(args.out / "metrics.json", metrics)
    print(json.dumps(metrics))
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "basis": cmd_basis,
    "fit": cmd_fit,
    "eval": cmd_eval,
    "solve": cmd_solve,
    "reproduce": cmd_reproduce,
}
