"""Truncated cones over arcs and caps in meridian coordinates.

Arc sections give planar sectors with points ``r (cos(theta - alpha/2),
sin(theta - alpha/2))``. Cap sections are reduced to the meridian half-plane
``(rho, z) = (r sin(theta), r cos(theta))`` with measure ``|S^{N-2}| rho^{N-2}``;
the axis ``theta = 0`` carries no boundary condition.
"""

from __future__ import annotations

from functools import cache
from typing import Self

import numpy as np
from attrs import field, frozen
from pydantic import BaseModel, ConfigDict, Field, model_validator

from spheig.fem_sphere import SurfaceMesh
from spheig.geometry import DomainKind, SphericalDomain
from spheig.ode_axisym import sphere_area
from spheig.settings import settings


class ConeDomain(BaseModel):
    model_config = ConfigDict(frozen=True)

    section: SphericalDomain
    a: float = Field(gt=0.0)
    b: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.a >= self.b:
            raise ValueError(f"inner radius {self.a} must be below outer radius {self.b}")
        if self.section.kind is DomainKind.POLYGON:
            raise ValueError("cones are built over arcs and caps only")
        return self

    @property
    def alpha(self) -> float:
        return float(self.section.alpha)

    @property
    def is_planar(self) -> bool:
        return self.section.kind is DomainKind.ARC


@frozen
class ConeGrid:
    """Log-spaced radii, uniform section angles and the triangulated carrier."""

    cone: ConeDomain
    r: np.ndarray = field(eq=False)
    theta: np.ndarray = field(eq=False)
    mesh: SurfaceMesh = field(eq=False)
    lateral: np.ndarray = field(eq=False)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.r), len(self.theta)

    @property
    def node_r(self) -> np.ndarray:
        return np.repeat(self.r, len(self.theta))

    @property
    def node_theta(self) -> np.ndarray:
        return np.tile(self.theta, len(self.r))

    def dirichlet(self, outer_zero: bool) -> np.ndarray:
        n_r, n_t = self.shape
        mask = self.lateral.copy()
        mask[:n_t] = True
        if outer_zero:
            mask[(n_r - 1) * n_t :] = True
        return mask

    def lateral_distance(self) -> np.ndarray:
        """Euclidean distance of every node to the lateral boundary of the cone."""
        r, theta = self.node_r, self.node_theta
        alpha = self.cone.alpha
        gap = alpha - theta
        if self.cone.is_planar:
            gap = np.minimum(gap, theta)
        return np.where(gap <= np.pi / 2.0, r * np.sin(gap), r)

    def lift(self, profile: np.ndarray, beta: float) -> np.ndarray:
        """Nodal values of the separable field ``r^-beta * profile(theta)``."""
        return np.outer(self.r ** (-beta), profile).ravel()


@cache
def cone_grid(cone: ConeDomain, n_r: int | None = None, n_theta: int | None = None) -> ConeGrid:
    n_r = settings.cone_n_r if n_r is None else n_r
    n_theta = settings.cone_n_theta if n_theta is None else n_theta
    r = np.geomspace(cone.a, cone.b, n_r)
    theta = np.linspace(0.0, cone.alpha, n_theta)
    return _build(cone, r, theta)


def cone_grid_spaced(cone: ConeDomain, dlog: float, n_theta: int | None = None) -> ConeGrid:
    """Grid with radial spacing ``dlog`` in ln r, so grids of nested cones share nodes."""
    steps = np.log(cone.b / cone.a) / dlog
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ValueError(f"b/a = {cone.b / cone.a:g} is not a whole number of log steps {dlog:g}")
    n_r = round(steps) + 1
    r = cone.a * np.exp(dlog * np.arange(n_r))
    r[-1] = cone.b
    theta = np.linspace(0.0, cone.alpha, settings.cone_n_theta if n_theta is None else n_theta)
    return _build(cone, r, theta)


def _build(cone: ConeDomain, r: np.ndarray, theta: np.ndarray) -> ConeGrid:
    n_r, n_t = len(r), len(theta)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    if cone.is_planar:
        phi = tt - cone.alpha / 2.0
        pts = np.column_stack([(rr * np.cos(phi)).ravel(), (rr * np.sin(phi)).ravel()])
    else:
        pts = np.column_stack([(rr * np.sin(tt)).ravel(), (rr * np.cos(tt)).ravel()])

    idx = np.arange(n_r * n_t).reshape(n_r, n_t)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    cells = np.vstack([np.column_stack([a, b, c]), np.column_stack([a, c, d])])

    if cone.is_planar:
        density = np.ones(len(cells))
    else:
        rho = pts[cells][:, :, 0].mean(axis=1)
        dim = cone.section.dim
        density = sphere_area(dim - 2) * rho ** (dim - 2)

    lateral = np.zeros(n_r * n_t, dtype=bool)
    lateral[idx[:, -1]] = True
    if cone.is_planar:
        lateral[idx[:, 0]] = True
    mesh = SurfaceMesh(
        vertices=pts,
        cells=cells,
        boundary=lateral.copy(),
        density=density,
        on_sphere=False,
    )
    return ConeGrid(cone=cone, r=r, theta=theta, mesh=mesh, lateral=lateral)


@frozen
class ConeField:
    """A discrete function on a truncated cone together with its boundary setup."""

    grid: ConeGrid
    values: np.ndarray = field(eq=False)
    outer_zero: bool = True

    @property
    def cone(self) -> ConeDomain:
        return self.grid.cone

    @property
    def mesh(self) -> SurfaceMesh:
        return self.grid.mesh

    def as_array(self) -> np.ndarray:
        """Values reshaped to (radii, angles)."""
        return self.values.reshape(self.grid.shape)

    def ray(self, theta0: float) -> tuple[np.ndarray, np.ndarray, float]:
        """Radii and values along the grid ray closest to ``theta0``."""
        j = int(np.argmin(np.abs(self.grid.theta - theta0)))
        return self.grid.r, self.as_array()[:, j], float(self.grid.theta[j])

    def nodal_gradients(self) -> np.ndarray:
        """Cell gradients averaged onto nodes with area weights."""
        mesh = self.mesh
        _, g = mesh.mean_and_gradient(self.values)
        area = mesh.measures
        acc = np.zeros((mesh.n_vertices, g.shape[1]))
        wsum = np.zeros(mesh.n_vertices)
        for k in range(mesh.cells.shape[1]):
            np.add.at(acc, mesh.cells[:, k], area[:, None] * g)
            np.add.at(wsum, mesh.cells[:, k], area)
        return acc / wsum[:, None]
