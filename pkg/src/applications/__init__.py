"""Least-squares applications: Hermite fitting, derivative recovery and Poisson solvers."""

from .problems import (
    BoundaryData,
    CoefficientSolve,
    LsProblem,
    build_hermite,
    build_interpolation,
    build_poisson_dirichlet,
    build_poisson_mixed,
    fit_problem,
    monomial_least_squares,
    solve_coefficients,
)

__all__ = [
    "BoundaryData",
    "CoefficientSolve",
    "LsProblem",
    "build_hermite",
    "build_interpolation",
    "build_poisson_dirichlet",
    "build_poisson_mixed",
    "fit_problem",
    "monomial_least_squares",
    "solve_coefficients",
]
