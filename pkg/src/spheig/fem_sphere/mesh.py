"""Simplicial meshes of spherical domains and their meridian sections.

One container serves three carriers:

* triangles on S^2 (polygons, caps with N = 3): ``vertices`` are unit 3-vectors;
* 1D meshes in the arc or colatitude parameter (arcs, caps of any N): ``vertices``
  hold theta, ``embedding`` the matching unit vectors;
* planar meshes of cone sections (see ``spheig.cone``).

``density`` is a per-cell factor multiplying the Lebesgue measure of the cell, e.g.
``|S^{N-2}| sin^{N-2}(theta)`` on a colatitude mesh.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from attrs import field, frozen
from matplotlib.path import Path as PlanarPath
from scipy.spatial import Delaunay

from spheig.errors import MeshError
from spheig.geometry import DomainKind, SphericalDomain, gnomonic_chart
from spheig.ode_axisym import ColatGrid, colatitude_density

UNIT_TOL = 1e-12


@frozen
class SurfaceMesh:
    vertices: np.ndarray = field(eq=False)
    cells: np.ndarray = field(eq=False)
    boundary: np.ndarray = field(eq=False)
    density: np.ndarray = field(eq=False)
    embedding: np.ndarray | None = field(default=None, eq=False)
    on_sphere: bool = True

    def __attrs_post_init__(self) -> None:
        if self.cells.ndim != 2 or self.cells.shape[1] not in (2, 3):
            raise MeshError("cells must be segments or triangles", shape=self.cells.shape)
        if self.boundary.shape != (len(self.vertices),):
            raise MeshError("one boundary flag per vertex is required")
        if self.density.shape != (len(self.cells),):
            raise MeshError("one density value per cell is required")
        points = self.points
        if self.on_sphere and np.any(np.abs(np.linalg.norm(points, axis=1) - 1.0) > UNIT_TOL):
            raise MeshError("mesh vertices must lie on the unit sphere")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def points(self) -> np.ndarray:
        """Ambient coordinates of the vertices."""
        return self.vertices if self.embedding is None else self.embedding

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @cached_property
    def _geometry(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.vertices[self.cells]
        if self.cells.shape[1] == 2:
            length = np.linalg.norm(x[:, 1] - x[:, 0], axis=1)
            safe = np.where(length > 0, length, 1.0)[:, None]
            unit = (x[:, 1] - x[:, 0]) / safe
            grads = np.stack([-unit / safe, unit / safe], axis=1)
            return length, grads
        e1 = x[:, 1] - x[:, 0]
        e2 = x[:, 2] - x[:, 0]
        g11 = np.einsum("ij,ij->i", e1, e1)
        g12 = np.einsum("ij,ij->i", e1, e2)
        g22 = np.einsum("ij,ij->i", e2, e2)
        det = g11 * g22 - g12 * g12
        area = 0.5 * np.sqrt(np.maximum(det, 0.0))
        safe = np.where(det > 0, det, 1.0)
        # barycentric gradients from the inverse Gram matrix of the edge vectors
        grad1 = (g22 / safe)[:, None] * e1 - (g12 / safe)[:, None] * e2
        grad2 = (g11 / safe)[:, None] * e2 - (g12 / safe)[:, None] * e1
        grads = np.stack([-grad1 - grad2, grad1, grad2], axis=1)
        return area, grads

    @property
    def measures(self) -> np.ndarray:
        """Cell lengths or areas."""
        return self._geometry[0]

    @property
    def grads(self) -> np.ndarray:
        """Gradients of the barycentric coordinates, shape (cells, k, d)."""
        return self._geometry[1]

    @cached_property
    def h(self) -> float:
        x = self.vertices[self.cells]
        k = self.cells.shape[1]
        edges = [np.linalg.norm(x[:, i] - x[:, j], axis=1) for i in range(k) for j in range(i + 1, k)]
        return float(np.max(edges))

    @property
    def weighted_measures(self) -> np.ndarray:
        return self.measures * self.density

    def check_cells(self) -> None:
        tiny = 1e-14 * self.h ** (self.cells.shape[1] - 1)
        bad = np.flatnonzero(self.measures <= tiny)
        if bad.size:
            raise MeshError(
                f"{bad.size} degenerate cells in mesh",
                cells=bad[:10].tolist(),
            )

    def integrate(self, f: np.ndarray) -> float:
        """Integral of a nodal P1 function (exact for P1 with cellwise density)."""
        return float(np.sum(self.weighted_measures * f[self.cells].mean(axis=1)))

    def mean_and_gradient(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Cell averages and (constant) cell gradients of a nodal field."""
        local = values[self.cells]
        return local.mean(axis=1), np.einsum("ek,ekd->ed", local, self.grads)


@frozen
class DiscreteField:
    """Nodal values of a P1 function on a mesh."""

    mesh: SurfaceMesh
    values: np.ndarray = field(eq=False)

    def __attrs_post_init__(self) -> None:
        if self.values.shape != (self.mesh.n_vertices,):
            raise MeshError("field size does not match mesh")
        if not np.all(np.isfinite(self.values)):
            raise MeshError("field has non-finite values")

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.mesh.interior]

    def satisfies_dirichlet(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values[self.mesh.boundary]) <= atol))

    def l1_norm(self) -> float:
        return self.mesh.integrate(np.abs(self.values))

    def lp_norm(self, p: float) -> float:
        return self.mesh.integrate(np.abs(self.values) ** p) ** (1.0 / p)

    def scaled(self, factor: float) -> DiscreteField:
        return DiscreteField(self.mesh, factor * self.values)

    def with_values(self, values: np.ndarray) -> DiscreteField:
        return DiscreteField(self.mesh, values)


def _segment_mesh(theta: np.ndarray, embedding: np.ndarray, boundary: np.ndarray, density: np.ndarray) -> SurfaceMesh:
    cells = np.column_stack([np.arange(len(theta) - 1), np.arange(1, len(theta))])
    return SurfaceMesh(
        vertices=theta[:, None],
        cells=cells,
        boundary=boundary,
        density=density,
        embedding=embedding,
    )


def arc_mesh(alpha: float, n: int = 64, theta: np.ndarray | None = None) -> SurfaceMesh:
    """Uniform 1D mesh of the arc |phi| < alpha / 2, parametrized from one end."""
    theta = np.linspace(0.0, alpha, n + 1) if theta is None else np.asarray(theta, dtype=float)
    phi = theta - alpha / 2.0
    boundary = np.zeros(len(theta), dtype=bool)
    boundary[[0, -1]] = True
    return _segment_mesh(
        theta,
        np.column_stack([np.cos(phi), np.sin(phi)]),
        boundary,
        np.ones(len(theta) - 1),
    )


def meridian_mesh(
    alpha: float, dim: int, n: int = 64, theta: np.ndarray | None = None
) -> SurfaceMesh:
    """1D colatitude mesh of an axisymmetric cap on S^{N-1}; the pole is interior."""
    theta = np.linspace(0.0, alpha, n + 1) if theta is None else np.asarray(theta, dtype=float)
    mid = 0.5 * (theta[1:] + theta[:-1])
    embedding = np.zeros((len(theta), dim))
    embedding[:, 0] = np.sin(theta)
    embedding[:, -1] = np.cos(theta)
    boundary = np.zeros(len(theta), dtype=bool)
    boundary[-1] = True
    return _segment_mesh(theta, embedding, boundary, colatitude_density(mid, dim))


def cap_mesh(alpha: float, n_rings: int = 16) -> SurfaceMesh:
    """Triangulated polar cap on S^2 with ``6 j`` nodes on the j-th latitude ring."""
    rings = [np.zeros((1, 2))]
    for j in range(1, n_rings + 1):
        theta = alpha * j / n_rings
        phi = 2.0 * np.pi * np.arange(6 * j) / (6 * j)
        rings.append(np.column_stack([theta * np.cos(phi), theta * np.sin(phi)]))
    chart = np.vstack(rings)
    cells = Delaunay(chart).simplices
    theta = np.linalg.norm(chart, axis=1)
    phi = np.arctan2(chart[:, 1], chart[:, 0])
    vertices = np.column_stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )
    vertices /= np.linalg.norm(vertices, axis=1, keepdims=True)
    boundary = np.zeros(len(chart), dtype=bool)
    boundary[-6 * n_rings :] = True
    return SurfaceMesh(
        vertices=vertices,
        cells=_orient(vertices, cells),
        boundary=boundary,
        density=np.ones(len(cells)),
    )


def polygon_mesh(domain: SphericalDomain, h: float = 0.05) -> SurfaceMesh:
    """Triangulated geodesic polygon built in the gnomonic chart at its center.

    Edges are straight in the chart, so boundary nodes placed on chart edges lie
    exactly on the geodesic sides.
    """
    chart = gnomonic_chart(domain.center)
    corners = chart.forward(domain.vertex_array)
    boundary_pts = []
    for a, b in zip(corners, np.roll(corners, -1, axis=0), strict=True):
        m = max(2, int(np.ceil(np.linalg.norm(b - a) / h)))
        t = np.arange(m) / m
        boundary_pts.append(a + t[:, None] * (b - a))
    boundary_uv = np.vstack(boundary_pts)

    path = PlanarPath(corners)
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    dy = h * np.sqrt(3.0) / 2.0
    rows = []
    for i, y in enumerate(np.arange(lo[1], hi[1] + dy, dy)):
        x = np.arange(lo[0] + (h / 2.0 if i % 2 else 0.0), hi[0] + h, h)
        rows.append(np.column_stack([x, np.full_like(x, y)]))
    lattice = np.vstack(rows)
    inside = path.contains_points(lattice)
    lattice = lattice[inside]
    gap = _chart_edge_distance(lattice, corners)
    lattice = lattice[gap > 0.5 * h]

    uv = np.vstack([boundary_uv, lattice])
    cells = Delaunay(uv).simplices
    centroids = uv[cells].mean(axis=1)
    cells = cells[path.contains_points(centroids)]
    vertices = chart.inverse(uv)
    boundary = np.zeros(len(uv), dtype=bool)
    boundary[: len(boundary_uv)] = True
    mesh = SurfaceMesh(
        vertices=vertices,
        cells=_orient(vertices, cells),
        boundary=boundary,
        density=np.ones(len(cells)),
    )
    mesh.check_cells()
    return mesh


def _chart_edge_distance(points: np.ndarray, corners: np.ndarray) -> np.ndarray:
    dist = np.full(len(points), np.inf)
    for a, b in zip(corners, np.roll(corners, -1, axis=0), strict=True):
        ab = b - a
        t = np.clip(((points - a) @ ab) / (ab @ ab), 0.0, 1.0)
        dist = np.minimum(dist, np.linalg.norm(points - (a + t[:, None] * ab), axis=1))
    return dist


def _orient(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    x = vertices[cells]
    normal = np.cross(x[:, 1] - x[:, 0], x[:, 2] - x[:, 0])
    flip = np.einsum("ij,ij->i", normal, x.mean(axis=1)) < 0
    cells = cells.copy()
    cells[flip] = cells[flip][:, [0, 2, 1]]
    return cells


def mesh_for(domain: SphericalDomain, level: int = 0, *, meridian: bool | None = None) -> SurfaceMesh:
    """Default mesh of a domain; every level halves the mesh size.

    Caps use the 1D colatitude mesh unless ``meridian=False`` and N = 3.
    """
    match domain.kind:
        case DomainKind.ARC:
            return arc_mesh(domain.alpha, 64 * 2**level)
        case DomainKind.CAP:
            if meridian is False and domain.dim == 3:
                return cap_mesh(domain.alpha, 12 * 2**level)
            return meridian_mesh(domain.alpha, domain.dim, 64 * 2**level)
        case DomainKind.POLYGON:
            return polygon_mesh(domain, 0.08 / 2**level)


def mesh_from_grid(grid: ColatGrid) -> SurfaceMesh:
    if grid.is_arc:
        return arc_mesh(grid.alpha, theta=grid.nodes)
    return meridian_mesh(grid.alpha, grid.dim, theta=grid.nodes)


def field_from_grid(grid: ColatGrid) -> DiscreteField:
    mesh = mesh_from_grid(grid)
    return DiscreteField(mesh, grid.values.copy())


def interpolate_profile(grid: ColatGrid, mesh: SurfaceMesh, domain: SphericalDomain) -> DiscreteField:
    """Transfer an axisymmetric profile onto any mesh of the matching domain."""
    if mesh.cells.shape[1] == 2:
        theta = mesh.vertices[:, 0] * (grid.alpha / mesh.vertices[-1, 0])
    else:
        pole = domain.center
        theta = np.arccos(np.clip(mesh.points @ pole, -1.0, 1.0))
    values = grid.evaluate(theta)
    values[mesh.boundary] = 0.0
    return DiscreteField(mesh, values)
