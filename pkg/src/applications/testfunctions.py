#!/usr/bin/env python3
"""
Named test functions with analytic partials, and named coefficient functions.

Used to manufacture data for the fitting applications: samples, boundary
derivatives, Laplacians and right-hand sides of u + alpha * Lap(u) = f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..basis.stacked import DerivOrder, NodeSet, hessian_pairs

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """A smooth bivariate function with closed-form gradient and Hessian.

    ``gradient`` returns shape (m, 2) and ``hessian`` returns (m, 2, 2).
    """

    __test__ = False  # not a pytest class

    name: str
    value: Field
    gradient: Field
    hessian: Field

    def laplacian(self, x: np.ndarray) -> np.ndarray:
        return np.trace(self.hessian(x), axis1=1, axis2=2)

    def divergence(self, x: np.ndarray) -> np.ndarray:
        return self.gradient(x).sum(axis=1)

    def normal_derivative(self, x: np.ndarray, normals: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ij->i", self.gradient(x), normals)

    def stacked(self, nodes: NodeSet, order: int | DerivOrder) -> np.ndarray:
        """Values and partials in stacked block order."""
        order = DerivOrder.coerce(order)
        x = nodes.coords
        blocks = [self.value(x)]
        if order >= DerivOrder.FIRST:
            grad = self.gradient(x)
            blocks += [grad[:, j] for j in range(nodes.d)]
        if order >= DerivOrder.SECOND:
            hess = self.hessian(x)
            blocks += [hess[:, j, k] for j, k in hessian_pairs(nodes.d)]
        return np.concatenate(blocks)

    def poisson_rhs(self, x: np.ndarray, alpha: np.ndarray | float) -> np.ndarray:
        """f = u + alpha * Lap(u) for this function as the exact solution u."""
        return self.value(x) + np.asarray(alpha) * self.laplacian(x)


def _sin_xy() -> TestFunction:
    def value(x):
        return np.sin(x[:, 0] * x[:, 1])

    def gradient(x):
        c = np.cos(x[:, 0] * x[:, 1])
        return np.column_stack([x[:, 1] * c, x[:, 0] * c])

    def hessian(x):
        p = x[:, 0] * x[:, 1]
        s, c = np.sin(p), np.cos(p)
        h = np.empty((x.shape[0], 2, 2))
        h[:, 0, 0] = -x[:, 1] ** 2 * s
        h[:, 1, 1] = -x[:, 0] ** 2 * s
        h[:, 0, 1] = h[:, 1, 0] = c - p * s
        return h

    return TestFunction("sin_xy", value, gradient, hessian)


def _exp_linear() -> TestFunction:
    def value(x):
        return np.exp(x[:, 0] + x[:, 1] / 2)

    def gradient(x):
        u = value(x)
        return np.column_stack([u, u / 2])

    def hessian(x):
        u = value(x)
        h = np.empty((x.shape[0], 2, 2))
        h[:, 0, 0] = u
        h[:, 1, 1] = u / 4
        h[:, 0, 1] = h[:, 1, 0] = u / 2
        return h

    return TestFunction("exp_linear", value, gradient, hessian)


def _gaussian_quadratic() -> TestFunction:
    def value(x):
        return np.exp(-3 * (x[:, 0] ** 2 + x[:, 0] * x[:, 1] + x[:, 1] ** 2))

    def gradient(x):
        f = value(x)
        a = 2 * x[:, 0] + x[:, 1]
        b = x[:, 0] + 2 * x[:, 1]
        return np.column_stack([-3 * a * f, -3 * b * f])

    def hessian(x):
        f = value(x)
        a = 2 * x[:, 0] + x[:, 1]
        b = x[:, 0] + 2 * x[:, 1]
        h = np.empty((x.shape[0], 2, 2))
        h[:, 0, 0] = (9 * a**2 - 6) * f
        h[:, 1, 1] = (9 * b**2 - 6) * f
        h[:, 0, 1] = h[:, 1, 0] = (9 * a * b - 3) * f
        return h

    return TestFunction("gaussian_quadratic", value, gradient, hessian)


def _const_one() -> TestFunction:
    return TestFunction(
        "const_one",
        lambda x: np.ones(x.shape[0]),
        lambda x: np.zeros((x.shape[0], 2)),
        lambda x: np.zeros((x.shape[0], 2, 2)),
    )


TEST_FUNCTIONS: dict[str, TestFunction] = {
    fn.name: fn for fn in (_sin_xy(), _exp_linear(), _gaussian_quadratic(), _const_one())
}


def neg_gaussian(x: np.ndarray) -> np.ndarray:
    """alpha(x) = -exp(-|x|^2)."""
    return -np.exp(-np.sum(np.abs(x) ** 2, axis=1))


ALPHA_FUNCTIONS: dict[str, Field] = {
    "neg_gaussian": neg_gaussian,
}


def get_test_function(name: str) -> TestFunction:
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"Unknown test function '{name}'; known: {sorted(TEST_FUNCTIONS)}") from None


def get_alpha_function(name: str) -> Field:
    try:
        return ALPHA_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"Unknown alpha function '{name}'; known: {sorted(ALPHA_FUNCTIONS)}") from None
