#!/usr/bin/env python3
"""Unit tests for the stacked layout and the shift operator."""

from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from src.basis.grevlex import enumerate_basis
from src.basis.stacked import (
    DerivOrder,
    NodeSet,
    StackedLayout,
    apply_shift,
    block_names,
    constant_column,
    hessian_pairs,
    monomial_column,
    shift_matrix,
    stacked_dim,
)
from src.errors import LayoutMismatchError


@pytest.fixture
def nodes3(rng):
    return NodeSet(rng.uniform(-1, 1, size=(7, 3)))


class TestLayout:
    """Test block counts and names."""

    @pytest.mark.parametrize("d,order,expected", [(3, 2, 10), (1, 2, 3), (2, 0, 1), (2, 1, 3), (2, 2, 6)])
    def test_stacked_dim(self, d, order, expected):
        """d_tilde counts values, gradient and upper Hessian blocks."""
        assert stacked_dim(d, order) == expected

    def test_block_names_order(self):
        """Blocks are f, gradient, then the Hessian row-major."""
        assert block_names(2, 2) == ["f", "d1", "d2", "d11", "d12", "d22"]
        assert block_names(3, 1) == ["f", "d1", "d2", "d3"]

    def test_hessian_pairs(self):
        """Pairs are upper-triangular and row-major."""
        assert hessian_pairs(3) == [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]

    def test_hessian_block_symmetric(self):
        """hessian_block(j, k) and (k, j) address the same block."""
        layout = StackedLayout(5, 3, DerivOrder.SECOND)
        assert layout.hessian_block(2, 0) == layout.hessian_block(0, 2) == layout.block_index("d13")

    def test_unknown_block(self):
        """Blocks outside the order raise LayoutMismatchError."""
        with pytest.raises(LayoutMismatchError):
            StackedLayout(4, 2, DerivOrder.FIRST).block_index("d11")

    def test_invalid_order(self):
        """Order 3 is rejected."""
        with pytest.raises(ValueError):
            DerivOrder.coerce(3)

    def test_wrong_length(self):
        """check rejects vectors of the wrong size."""
        layout = StackedLayout(4, 2, DerivOrder.SECOND)
        with pytest.raises(LayoutMismatchError):
            layout.check(np.zeros(layout.size + 1))

    def test_split_views(self):
        """split returns one block per name."""
        layout = StackedLayout(3, 2, DerivOrder.FIRST)
        v = np.arange(layout.size, dtype=float)
        parts = layout.split(v)
        assert list(parts) == ["f", "d1", "d2"]
        np.testing.assert_array_equal(parts["d2"], [6.0, 7.0, 8.0])

    def test_constant_column(self, nodes3):
        """The constant is 1 on the f block and 0 elsewhere."""
        v = constant_column(nodes3, 2)
        blocks = StackedLayout.for_nodes(nodes3, 2).blocks(v)
        np.testing.assert_array_equal(blocks[0], 1.0)
        np.testing.assert_array_equal(blocks[1:], 0.0)


class TestNodeSet:
    """Test NodeSet validation."""

    def test_vector_is_one_dimensional(self):
        """A flat array is read as m nodes in d=1."""
        nodes = NodeSet(np.array([0.0, 0.5, 1.0]))
        assert (nodes.m, nodes.d) == (3, 1)

    def test_non_finite_rejected(self):
        """NaN coordinates are rejected."""
        with pytest.raises(ValueError):
            NodeSet(np.array([[0.0, np.nan]]))

    def test_empty_rejected(self):
        """Zero nodes are rejected."""
        with pytest.raises(ValueError):
            NodeSet(np.zeros((0, 2)))

    def test_coords_read_only(self):
        """Coordinates are frozen."""
        nodes = NodeSet(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            nodes.coords[0, 0] = 1.0

    def test_concatenate_and_subset(self):
        """concatenate stacks rows; subset selects them."""
        a = NodeSet(np.zeros((2, 2)))
        b = NodeSet(np.ones((3, 2)))
        both = NodeSet.concatenate(a, b)
        assert both.m == 5
        np.testing.assert_array_equal(both.subset([2, 4]).coords, np.ones((2, 2)))


class TestMonomialColumn:
    """Test exact monomial evaluation against symbolic derivatives."""

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_sympy(self, d, rng):
        """Every block agrees with sympy derivatives of x^alpha."""
        xs = sp.symbols(f"x1:{d + 1}")
        pts = rng.uniform(-1.2, 1.2, size=(5, d))
        nodes = NodeSet(pts)
        layout = StackedLayout.for_nodes(nodes, DerivOrder.SECOND)
        for mi in enumerate_basis(d, 4).indices:
            expr = sp.prod([x ** a for x, a in zip(xs, mi.exponents)])
            exprs = [expr] + [sp.diff(expr, x) for x in xs]
            exprs += [sp.diff(expr, xs[j], xs[k]) for j, k in hessian_pairs(d)]
            expected = np.array(
                [[float(sp.lambdify(xs, e)(*p)) for p in pts] for e in exprs]
            )
            np.testing.assert_allclose(
                layout.blocks(monomial_column(mi, nodes, 2)), expected, rtol=1e-13, atol=1e-13
            )

    def test_dimension_mismatch(self, nodes3):
        """A multi-index of the wrong length raises."""
        with pytest.raises(LayoutMismatchError):
            monomial_column((1, 0), nodes3, 0)


class TestShift:
    """Test the product-rule shift operator."""

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_shift_raises_exponent(self, order, nodes3):
        """X_u applied to x^alpha gives x^(alpha + e_u) on every block."""
        for mi in enumerate_basis(3, 3).indices:
            for u in range(3):
                np.testing.assert_allclose(
                    apply_shift(u, monomial_column(mi, nodes3, order), nodes3, order),
                    monomial_column(mi.shifted(u), nodes3, order),
                    rtol=1e-13,
                    atol=1e-13,
                )

    def test_shifts_commute(self, nodes3, rng):
        """X_u X_v = X_v X_u on arbitrary stacked vectors."""
        v = rng.standard_normal(StackedLayout.for_nodes(nodes3, 2).size)
        for u in range(3):
            for w in range(3):
                np.testing.assert_allclose(
                    apply_shift(u, apply_shift(w, v, nodes3, 2), nodes3, 2),
                    apply_shift(w, apply_shift(u, v, nodes3, 2), nodes3, 2),
                    rtol=1e-13,
                    atol=1e-13,
                )

    def test_linear(self, nodes3, rng):
        """Shifting is linear."""
        size = StackedLayout.for_nodes(nodes3, 2).size
        a, b = rng.standard_normal(size), rng.standard_normal(size)
        np.testing.assert_allclose(
            apply_shift(1, 2.0 * a - b, nodes3, 2),
            2.0 * apply_shift(1, a, nodes3, 2) - apply_shift(1, b, nodes3, 2),
            atol=1e-13,
        )

    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_matches_assembled_matrix(self, order, nodes3, rng):
        """The matrix-free shift equals the sparse block matrix."""
        v = rng.standard_normal(StackedLayout.for_nodes(nodes3, order).size)
        for u in range(3):
            np.testing.assert_allclose(
                apply_shift(u, v, nodes3, order), shift_matrix(u, nodes3, order) @ v, atol=1e-14
            )

    def test_multiple_columns(self, nodes3, rng):
        """Trailing columns are shifted independently."""
        size = StackedLayout.for_nodes(nodes3, 1).size
        block = rng.standard_normal((size, 4))
        out = apply_shift(2, block, nodes3, 1)
        assert out.shape == block.shape
        np.testing.assert_allclose(out[:, 3], apply_shift(2, block[:, 3], nodes3, 1))

    def test_complex_nodes(self):
        """Complex nodes shift without losing the imaginary part."""
        nodes = NodeSet(np.exp(2j * np.pi * np.arange(4) / 4))
        v = constant_column(nodes, 1, dtype=np.complex128)
        out = apply_shift(0, v, nodes, 1)
        np.testing.assert_allclose(out[:4], nodes.coords[:, 0])
        np.testing.assert_allclose(out[4:], 1.0)

    def test_coordinate_out_of_range(self, nodes3):
        """u must index an existing coordinate."""
        with pytest.raises(ValueError):
            apply_shift(3, constant_column(nodes3, 0), nodes3, 0)
