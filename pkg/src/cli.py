#!/usr/bin/env python3
"""
Command-line interface for mvga.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from .applications.examples import EXAMPLES
from .config.config import runtime_config
from .config.models import APP_ORDERS
from .config.parsing import parse_alpha_spec


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out",
        type=Path,
        required=True,
        help="Output directory (created if missing).",
    )
    hex_default = runtime_config.settings().hex_floats
    parser.add_argument(
        "--hex-floats",
        dest="hex_floats",
        action="store_true",
        default=hex_default,
        help="Write floats as hex literals for bit-exact round trips (default: from MVGA_HEX_FLOATS).",
    )


def _add_problem_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--alpha",
        default=None,
        help="Coefficient of the Laplacian: <float>, const:<float> or a named function (neg_gaussian).",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed for jittered node generation.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvga",
        description=(
            "Fit multivariate polynomials in a discrete G-orthonormal basis, "
            "evaluate them with their partial derivatives, and solve the "
            "least-squares applications built on top."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    basis = sub.add_parser("basis", help="Print the graded basis and its parent table as JSON.")
    basis.add_argument("--dim", type=int, required=True, help="Number of variables d.")
    basis.add_argument("--degree", type=int, required=True, help="Total degree n.")

    fit = sub.add_parser("fit", help="Fit a model from node/value files or a problem file.")
    fit.add_argument("--nodes", type=Path, default=None, help="CSV with one node per row (d columns).")
    fit.add_argument("--values", type=Path, default=None, help="CSV with one function value per node.")
    fit.add_argument("--degree", type=int, default=None, help="Total degree n.")
    fit.add_argument("--order", type=int, choices=[0, 1, 2], default=None, help="Stacked derivative order.")
    fit.add_argument(
        "--app",
        default="interpolation",
        choices=sorted(APP_ORDERS),
        help="Application kind for node files (only interpolation reads node files).",
    )
    fit.add_argument("--problem", type=Path, default=None, help="Problem specification JSON.")
    _add_problem_flags(fit)
    _add_output_flags(fit)

    ev = sub.add_parser("eval", help="Evaluate a fitted model at new nodes.")
    ev.add_argument("--model", type=Path, required=True, help="Model JSON written by 'fit'.")
    ev.add_argument("--nodes", type=Path, required=True, help="CSV with one evaluation node per row.")
    ev.add_argument("--order", type=int, choices=[0, 1, 2], default=None,
                    help="Derivative order to evaluate (default: the model's order).")
    _add_output_flags(ev)

    solve = sub.add_parser("solve", help="Fit, solve and evaluate a problem end to end.")
    solve.add_argument("--problem", type=Path, required=True, help="Problem specification JSON.")
    solve.add_argument("--degree", type=int, default=None, help="Override the problem's degree.")
    _add_problem_flags(solve)
    _add_output_flags(solve)

    rep = sub.add_parser("reproduce", help="Run a named example at full scale.")
    rep.add_argument("--example", required=True, choices=sorted(EXAMPLES), help="Example name.")
    rep.add_argument("--seed", type=int, default=None, help="Seed for jittered node generation.")
    _add_output_flags(rep)
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments; usage errors exit with status 2."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, "dim", 1) < 1:
        parser.error("--dim must be at least 1")
    if getattr(args, "degree", None) is not None and args.degree < 0:
        parser.error("--degree must be non-negative")

    if args.command == "fit":
        if args.problem is None:
            if args.nodes is None:
                parser.error("fit needs --nodes or --problem")
            if args.degree is None:
                parser.error("fit needs --degree when reading node files")
            if args.app != "interpolation":
                parser.error(f"--app {args.app} needs a --problem file")

    if getattr(args, "alpha", None) is not None:
        try:
            args.alpha = parse_alpha_spec(args.alpha)
        except ValueError as e:
            parser.error(f"Invalid alpha specification: {e}")

    return args
