#!/usr/bin/env python3
"""Unit tests for node generation."""

from __future__ import annotations

import numpy as np
import pytest

from src.applications.geometry import (
    Disk,
    EllipseMinusDisk,
    Polygon,
    domain_nodes,
    get_domain,
    grid_nodes,
    padua_nodes,
)


class TestPadua:
    """Test Padua points."""

    @pytest.mark.parametrize("n,m", [(1, 3), (2, 6), (10, 66), (32, 561)])
    def test_count(self, n, m):
        """Degree n gives (n+1)(n+2)/2 points."""
        assert padua_nodes(n).m == m

    def test_in_square_and_distinct(self):
        """Points lie in [-1, 1]^2 and are distinct."""
        coords = padua_nodes(12).coords
        assert np.all(np.abs(coords) <= 1.0)
        assert len(np.unique(np.round(coords, 12), axis=0)) == coords.shape[0]

    def test_contains_corner(self):
        """j = k = 0 gives the corner (1, 1)."""
        np.testing.assert_allclose(padua_nodes(4).coords[0], [1.0, 1.0])

    def test_invalid_degree(self):
        """Degree zero is rejected."""
        with pytest.raises(ValueError):
            padua_nodes(0)


class TestGrid:
    """Test tensor grids."""

    def test_grid(self):
        """k x k points spanning the square."""
        nodes = grid_nodes(41)
        assert nodes.m == 41 * 41
        np.testing.assert_allclose(nodes.coords.min(axis=0), [-1, -1])
        np.testing.assert_allclose(nodes.coords.max(axis=0), [1, 1])


class TestDomains:
    """Test domain shapes."""

    def test_disk_normal(self):
        """The disk boundary normal at (1, 0) is (1, 0)."""
        pts, normals = Disk().curves()[0].equispaced(4)
        np.testing.assert_allclose(pts[0], [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(normals[0], [1.0, 0.0], atol=1e-15)

    def test_ellipse_curves(self):
        """The ellipse carries outward normals and the hole inward-to-center ones."""
        dom = EllipseMinusDisk()
        ellipse, hole = dom.curves()
        pts, nrm = ellipse.equispaced(96)
        np.testing.assert_allclose(np.linalg.norm(nrm, axis=1), 1.0, atol=1e-14)
        assert np.all(np.einsum("ij,ij->i", pts, nrm) > 0)
        hpts, hnrm = hole.equispaced(30)
        np.testing.assert_allclose(np.einsum("ij,ij->i", hpts, hnrm), -0.5, atol=1e-14)

    def test_ellipse_residual(self):
        """Boundary nodes satisfy one of the implicit equations."""
        dom = EllipseMinusDisk()
        nodes = domain_nodes(dom, 200, (96, 30))
        assert np.max(dom.boundary_residual(nodes.boundary.coords)) < 1e-12

    def test_equispaced_in_arclength(self):
        """Consecutive ellipse points are (nearly) equally far apart."""
        pts, _ = EllipseMinusDisk().curves()[0].equispaced(96)
        gaps = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
        assert gaps.max() / gaps.min() < 1.01

    def test_polygon_square(self):
        """A square contains its center, not an outside point, and has outward normals."""
        square = Polygon(((0, 0), (1, 0), (1, 1), (0, 1)))
        assert square.contains(np.array([[0.5, 0.5], [1.5, 0.5]])).tolist() == [True, False]
        pts, nrm = square.curves()[0].equispaced(8)
        center = np.array([0.5, 0.5])
        assert np.all(np.einsum("ij,ij->i", pts - center, nrm) > 0)

    def test_polygon_clockwise_input(self):
        """Clockwise vertex order is normalized."""
        square = Polygon(((0, 0), (0, 1), (1, 1), (1, 0)))
        pts, nrm = square.curves()[0].equispaced(4)
        assert np.all(np.einsum("ij,ij->i", pts - 0.5, nrm) > 0)

    def test_degenerate_polygon(self):
        """Collinear vertices are rejected."""
        with pytest.raises(ValueError):
            Polygon(((0, 0), (1, 1), (2, 2)))

    def test_unknown_domain(self):
        """Unknown names are rejected."""
        with pytest.raises(ValueError, match="Unknown domain"):
            get_domain("torus")


class TestDomainNodes:
    """Test quasi-uniform node generation."""

    def test_disk_counts(self):
        """Interior count lands near the target; boundary count is exact."""
        nodes = domain_nodes("disk", 120, 42)
        assert abs(nodes.interior.m - 120) <= 0.15 * 120
        assert nodes.boundary.m == 42
        assert nodes.normals.shape == (42, 2)

    def test_interior_strictly_inside(self):
        """Interior nodes keep a margin from the boundary."""
        nodes = domain_nodes(Disk(), 120, 42)
        radii = np.linalg.norm(nodes.interior.coords, axis=1)
        assert radii.max() < 1.0 - 0.4 * nodes.spacing

    def test_boundary_on_circle(self):
        """Boundary nodes lie on the unit circle with unit outward normals."""
        nodes = domain_nodes(Disk(), 60, 30)
        np.testing.assert_allclose(np.linalg.norm(nodes.boundary.coords, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(nodes.normals, nodes.boundary.coords, atol=1e-12)

    def test_per_curve_targets(self):
        """A sequence target fixes the count per curve."""
        nodes = domain_nodes(EllipseMinusDisk(), 150, (96, 30))
        outer, outer_normals = nodes.boundary_group(0)
        inner, _ = nodes.boundary_group(1)
        assert (outer.m, inner.m) == (96, 30)
        assert outer_normals.shape == (96, 2)

    def test_total_target_split_by_length(self):
        """A single total is shared in proportion to curve length."""
        nodes = domain_nodes(EllipseMinusDisk(), 150, 126)
        counts = np.bincount(nodes.curve)
        assert counts.sum() == 126
        assert counts[0] > counts[1]

    def test_iterates_as_triple(self):
        """Unpacking yields interior, boundary and normals."""
        interior, boundary, normals = domain_nodes(Disk(), 40, 20)
        assert interior.d == boundary.d == 2
        assert normals.shape == (20, 2)

    def test_deterministic_without_seed(self):
        """Without jitter the nodes are reproducible."""
        a = domain_nodes(Disk(), 80, 20)
        b = domain_nodes(Disk(), 80, 20)
        np.testing.assert_array_equal(a.interior.coords, b.interior.coords)

    def test_jitter_is_seeded(self):
        """The same seed gives the same jittered nodes, a new seed different ones."""
        a = domain_nodes(Disk(), 80, 20, jitter=0.1, seed=5)
        b = domain_nodes(Disk(), 80, 20, jitter=0.1, seed=5)
        c = domain_nodes(Disk(), 80, 20, jitter=0.1, seed=6)
        np.testing.assert_array_equal(a.interior.coords, b.interior.coords)
        assert not np.array_equal(a.interior.coords, c.interior.coords)
        assert np.all(Disk().contains(a.interior.coords))

    def test_invalid_targets(self):
        """Non-positive targets are rejected."""
        with pytest.raises(ValueError):
            domain_nodes(Disk(), 0, 10)
        with pytest.raises(ValueError):
            domain_nodes(Disk(), 10, 0)
        with pytest.raises(ValueError):
            domain_nodes(EllipseMinusDisk(), 10, (5,))
