#!/usr/bin/env python3
"""
Deterministic node sets: Padua points, tensor grids and quasi-uniform
interior/boundary nodes for planar domains.

Interior nodes come from a hexagonal lattice clipped to the domain, with the
spacing tuned until the count is close to the requested target. Boundary
nodes are equally spaced in arclength along each boundary curve and carry
outward unit normals from the curve parameterization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Protocol, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..basis.stacked import NodeSet

logger = logging.getLogger("mvga.applications.geometry")

ARCLENGTH_SAMPLES = 8192
INTERIOR_MARGIN = 0.5


def padua_nodes(n: int) -> NodeSet:
    """First-family Padua points of degree n on [-1, 1]^2.

    The points cos(j pi / n) x cos(k pi / (n + 1)) with j + k even, j = 0..n,
    k = 0..n+1; there are (n + 1)(n + 2) / 2 of them.
    """
    if n < 1:
        raise ValueError(f"Padua points need degree >= 1, got {n}")
    pts = [
        (math.cos(j * math.pi / n), math.cos(k * math.pi / (n + 1)))
        for j in range(n + 1)
        for k in range(n + 2)
        if (j + k) % 2 == 0
    ]
    return NodeSet(np.array(pts))


def grid_nodes(k: int, lo: float = -1.0, hi: float = 1.0) -> NodeSet:
    """k x k tensor grid on [lo, hi]^2."""
    axis = np.linspace(lo, hi, k)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    return NodeSet(np.column_stack([x1.ravel(), x2.ravel()]))


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed curve parameterized on [0, 1) with outward unit normals."""

    name: str
    point: Callable[[np.ndarray], np.ndarray]
    normal: Callable[[np.ndarray], np.ndarray]
    offset: float = 0.0

    def _arclength_table(self) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(0.0, 1.0, ARCLENGTH_SAMPLES + 1)
        pts = self.point(t)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        return t, np.concatenate([[0.0], np.cumsum(seg)])

    def length(self) -> float:
        return float(self._arclength_table()[1][-1])

    def equispaced(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """count points equally spaced in arclength, with their normals."""
        t, cum = self._arclength_table()
        s = (np.arange(count) + self.offset) * cum[-1] / count
        params = np.interp(s, cum, t)
        return self.point(params), self.normal(params)

    def samples(self, spacing: float) -> np.ndarray:
        count = max(16, int(math.ceil(self.length() / spacing)))
        return self.point(np.arange(count) / count)


class Domain(Protocol):
    name: str

    def contains(self, x: np.ndarray) -> np.ndarray: ...

    def curves(self) -> list[BoundaryCurve]: ...

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]: ...


def _circle(name: str, center: np.ndarray, radius: float, outward: bool) -> BoundaryCurve:
    sign = 1.0 if outward else -1.0

    def point(t):
        theta = 2 * np.pi * np.asarray(t)
        return center + radius * np.column_stack([np.cos(theta), np.sin(theta)])

    def normal(t):
        theta = 2 * np.pi * np.asarray(t)
        return sign * np.column_stack([np.cos(theta), np.sin(theta)])

    return BoundaryCurve(name, point, normal)


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    name: str = "disk"

    def contains(self, x: np.ndarray) -> np.ndarray:
        return np.sum((x - np.asarray(self.center)) ** 2, axis=1) < self.radius**2

    def curves(self) -> list[BoundaryCurve]:
        return [_circle("circle", np.asarray(self.center), self.radius, outward=True)]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def boundary_residual(self, x: np.ndarray) -> np.ndarray:
        return np.sqrt(np.sum((x - np.asarray(self.center)) ** 2, axis=1)) - self.radius


@dataclass(frozen=True)
class EllipseMinusDisk:
    """{x1^2/a^2 + x2^2/b^2 <= 1} minus the disk of radius r about the origin."""

    a: float = 1.0
    b: float = 2.0
    r: float = 0.5
    name: str = "ellipse_minus_disk"

    def contains(self, x: np.ndarray) -> np.ndarray:
        in_ellipse = (x[:, 0] / self.a) ** 2 + (x[:, 1] / self.b) ** 2 < 1.0
        outside_hole = x[:, 0] ** 2 + x[:, 1] ** 2 > self.r**2
        return in_ellipse & outside_hole

    def curves(self) -> list[BoundaryCurve]:
        a, b = self.a, self.b

        def point(t):
            theta = 2 * np.pi * np.asarray(t)
            return np.column_stack([a * np.cos(theta), b * np.sin(theta)])

        def normal(t):
            theta = 2 * np.pi * np.asarray(t)
            nrm = np.column_stack([np.cos(theta) / a, np.sin(theta) / b])
            return nrm / np.linalg.norm(nrm, axis=1, keepdims=True)

        ellipse = BoundaryCurve("ellipse", point, normal)
        hole = _circle("hole", np.zeros(2), self.r, outward=False)
        return [ellipse, hole]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([-self.a, -self.b]), np.array([self.a, self.b])

    def boundary_residual(self, x: np.ndarray) -> np.ndarray:
        """Smaller of the two implicit-equation residuals per point."""
        ellipse = np.abs((x[:, 0] / self.a) ** 2 + (x[:, 1] / self.b) ** 2 - 1.0)
        circle = np.abs(x[:, 0] ** 2 + x[:, 1] ** 2 - self.r**2)
        return np.minimum(ellipse, circle)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its vertices in order."""

    vertices: tuple[tuple[float, float], ...]
    name: str = "polygon"

    def __post_init__(self) -> None:
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
            raise ValueError("A polygon needs at least three 2-D vertices")
        if abs(self._signed_area(verts)) == 0.0:
            raise ValueError("Polygon has zero area")

    @staticmethod
    def _signed_area(v: np.ndarray) -> float:
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def _ccw(self) -> np.ndarray:
        v = np.asarray(self.vertices, dtype=float)
        return v if self._signed_area(v) > 0 else v[::-1]

    def contains(self, x: np.ndarray) -> np.ndarray:
        # Even-odd ray casting along +x1.
        v = self._ccw()
        w = np.roll(v, -1, axis=0)
        inside = np.zeros(x.shape[0], dtype=bool)
        for (x0, y0), (x1, y1) in zip(v, w):
            crosses = (y0 > x[:, 1]) != (y1 > x[:, 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                x_at = x0 + (x[:, 1] - y0) * (x1 - x0) / (y1 - y0)
            inside ^= crosses & (x[:, 0] < x_at)
        return inside

    def curves(self) -> list[BoundaryCurve]:
        v = self._ccw()
        w = np.roll(v, -1, axis=0)
        edges = w - v
        lengths = np.linalg.norm(edges, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(lengths)]) / lengths.sum()
        normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]

        def locate(t):
            t = np.mod(np.asarray(t, dtype=float), 1.0)
            k = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(lengths) - 1)
            return k, (t - cum[k]) / (cum[k + 1] - cum[k])

        def point(t):
            k, frac = locate(t)
            return v[k] + frac[:, None] * edges[k]

        def normal(t):
            k, _ = locate(t)
            return normals[k]

        # Half-step offset keeps boundary nodes off the vertices.
        return [BoundaryCurve("polygon", point, normal, offset=0.5)]

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        v = np.asarray(self.vertices, dtype=float)
        return v.min(axis=0), v.max(axis=0)


DOMAINS: dict[str, Callable[[], Domain]] = {
    "disk": Disk,
    "ellipse_minus_disk": EllipseMinusDisk,
}


def get_domain(name: str, **params) -> Domain:
    if name == "polygon":
        return Polygon(tuple(map(tuple, params["vertices"])))
    try:
        return DOMAINS[name](**params)
    except KeyError:
        raise ValueError(f"Unknown domain '{name}'; known: {sorted(DOMAINS) + ['polygon']}") from None


@dataclass(frozen=True)
class DomainNodes:
    """Interior and boundary nodes of a domain.

    Iterating yields (interior, boundary, normals). ``curve`` holds, for each
    boundary node, the index of the boundary curve it lies on.
    """

    interior: NodeSet
    boundary: NodeSet
    normals: np.ndarray
    curve: np.ndarray
    spacing: float

    def __iter__(self) -> Iterator:
        return iter((self.interior, self.boundary, self.normals))

    def boundary_group(self, index: int) -> tuple[NodeSet, np.ndarray]:
        rows = np.flatnonzero(self.curve == index)
        return self.boundary.subset(rows), self.normals[rows]


def _hex_lattice(lo: np.ndarray, hi: np.ndarray, h: float) -> np.ndarray:
    center = 0.5 * (lo + hi)
    dy = h * math.sqrt(3) / 2
    nx = int(math.ceil((hi[0] - lo[0]) / (2 * h))) + 1
    ny = int(math.ceil((hi[1] - lo[1]) / (2 * dy))) + 1
    rows = []
    for j in range(-ny, ny + 1):
        shift = 0.5 * h if j % 2 else 0.0
        xs = center[0] + shift + h * np.arange(-nx, nx + 1)
        rows.append(np.column_stack([xs, np.full(xs.shape, center[1] + j * dy)]))
    return np.vstack(rows)


def _boundary_tree(domain: Domain, spacing: float) -> cKDTree:
    samples = np.vstack([c.samples(spacing) for c in domain.curves()])
    return cKDTree(samples)


def _interior_for_spacing(domain: Domain, h: float) -> np.ndarray:
    lo, hi = domain.bounding_box()
    pts = _hex_lattice(np.asarray(lo, float), np.asarray(hi, float), h)
    pts = pts[domain.contains(pts)]
    if pts.size == 0:
        return pts
    dist, _ = _boundary_tree(domain, h / 20).query(pts)
    return pts[dist >= INTERIOR_MARGIN * h]


def _split_boundary_target(curves: Sequence[BoundaryCurve], target: int | Sequence[int]) -> list[int]:
    if not isinstance(target, int):
        counts = [int(c) for c in target]
        if len(counts) != len(curves):
            raise ValueError(f"Expected {len(curves)} boundary targets, got {len(counts)}")
        return counts
    lengths = np.array([c.length() for c in curves])
    raw = target * lengths / lengths.sum()
    counts = np.floor(raw).astype(int)
    # Largest remainders take the leftover points.
    for k in np.argsort(raw - counts)[::-1][: target - counts.sum()]:
        counts[k] += 1
    return counts.tolist()


def domain_nodes(
    domain: Domain | str,
    target_interior: int,
    target_boundary: int | Sequence[int],
    *,
    jitter: float = 0.0,
    seed: int | None = None,
) -> DomainNodes:
    """Quasi-uniform interior nodes and equi-arclength boundary nodes.

    ``target_boundary`` may be one total (split over the curves in proportion
    to their length) or one count per curve. ``jitter`` perturbs interior
    nodes by up to that fraction of the lattice spacing, reproducibly for a
    given ``seed``.
    """
    if isinstance(domain, str):
        domain = get_domain(domain)
    if target_interior < 1:
        raise ValueError(f"Interior target must be positive, got {target_interior}")
    curves = domain.curves()
    counts = _split_boundary_target(curves, target_boundary)
    if any(c < 1 for c in counts):
        raise ValueError(f"Boundary targets must be positive, got {counts}")

    lo, hi = domain.bounding_box()
    extent = float(np.max(np.asarray(hi) - np.asarray(lo)))
    if extent <= 0:
        raise ValueError(f"Domain '{domain.name}' is empty")

    h_lo, h_hi = extent * 1e-3, extent
    best_h, best_pts = h_hi, _interior_for_spacing(domain, h_hi)
    for _ in range(48):
        h_mid = math.sqrt(h_lo * h_hi)
        pts = _interior_for_spacing(domain, h_mid)
        if abs(len(pts) - target_interior) < abs(len(best_pts) - target_interior):
            best_h, best_pts = h_mid, pts
        if len(pts) > target_interior:
            h_lo = h_mid
        else:
            h_hi = h_mid
        if len(pts) == target_interior or h_hi / h_lo < 1 + 1e-9:
            break
    if best_pts.size == 0:
        raise ValueError(f"Interior target {target_interior} is infeasible for domain '{domain.name}'")

    interior = best_pts
    if jitter > 0:
        rng = np.random.default_rng(seed)
        moved = interior + jitter * best_h * rng.uniform(-0.5, 0.5, size=interior.shape)
        dist, _ = _boundary_tree(domain, best_h / 20).query(moved)
        keep = domain.contains(moved) & (dist >= 0.25 * best_h)
        interior = np.where(keep[:, None], moved, interior)

    points, normals, labels = [], [], []
    for index, (curve, count) in enumerate(zip(curves, counts)):
        pts, nrm = curve.equispaced(count)
        points.append(pts)
        normals.append(nrm)
        labels.append(np.full(count, index))

    logger.debug("Domain %s: %d interior (target %d), %d boundary, spacing %.4g",
                 domain.name, len(interior), target_interior, sum(counts), best_h)
    return DomainNodes(
        interior=NodeSet(interior),
        boundary=NodeSet(np.vstack(points)),
        normals=np.vstack(normals),
        curve=np.concatenate(labels),
        spacing=best_h,
    )
