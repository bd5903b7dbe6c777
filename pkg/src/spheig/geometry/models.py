from __future__ import annotations

from enum import StrEnum
from functools import cached_property
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

Vec3 = tuple[float, float, float]


class PParams(BaseModel):
    """Analytic parameters of the problem: the exponent p and ambient dimension."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(gt=1.0)
    dim: int = Field(ge=2)

    @computed_field
    @property
    def beta0(self) -> float:
        return (self.dim - self.p) / (self.p - 1.0)

    def eigen_factor(self, beta: float) -> float:
        """The eigenvalue ``(p-1) beta (beta - beta0)`` paired with ``beta``."""
        return (self.p - 1.0) * beta * (beta - self.beta0)


class DomainKind(StrEnum):
    ARC = "arc"
    CAP = "cap"
    POLYGON = "polygon"


class SphericalDomain(BaseModel):
    """An arc of S^1, a polar cap of S^{N-1}, or a geodesic polygon on S^2.

    Arcs are centered at (1, 0) and cover the angles |phi| < alpha / 2. Caps are
    centered at the north pole e_N and cover the colatitudes theta < alpha.
    Polygon vertices are stored counter-clockwise as seen from outside the sphere.
    """

    model_config = ConfigDict(frozen=True)

    kind: DomainKind
    alpha: float | None = None
    vertices: tuple[Vec3, ...] | None = None
    dim: int = Field(ge=2)

    @model_validator(mode="before")
    @classmethod
    def _orient_vertices(cls, data: object) -> object:
        if not isinstance(data, dict) or data.get("vertices") is None:
            return data
        v = np.asarray(data["vertices"], dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("polygon vertices must be a list of 3-vectors")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("polygon vertices must be unit vectors")
        v = v / norms[:, None]
        center = v.sum(axis=0)
        if np.linalg.norm(center) < 1e-12:
            raise ValueError("polygon vertices are balanced around the origin")
        center /= np.linalg.norm(center)
        turn = np.einsum("j,ij->", center, np.cross(v, np.roll(v, -1, axis=0)))
        if turn < 0:
            v = v[::-1]
        return {**data, "vertices": tuple(tuple(float(c) for c in row) for row in v)}

    @model_validator(mode="after")
    def _check_kind(self) -> Self:
        match self.kind:
            case DomainKind.ARC:
                if self.dim != 2:
                    raise ValueError("arcs live on S^1 and require dim = 2")
                if self.alpha is None or not 0.0 < self.alpha < 2.0 * np.pi:
                    raise ValueError("arc length must satisfy 0 < alpha < 2*pi")
            case DomainKind.CAP:
                if self.dim < 3:
                    raise ValueError("caps require dim >= 3")
                if self.alpha is None or not 0.0 < self.alpha < np.pi:
                    raise ValueError("cap opening must satisfy 0 < alpha < pi")
            case DomainKind.POLYGON:
                if self.dim != 3:
                    raise ValueError("geodesic polygons are supported on S^2 only")
                if self.vertices is None or len(self.vertices) < 3:
                    raise ValueError("a polygon needs at least three vertices")
                _check_polygon(np.asarray(self.vertices))
        return self

    @classmethod
    def arc(cls, alpha: float) -> SphericalDomain:
        return cls(kind=DomainKind.ARC, alpha=alpha, dim=2)

    @classmethod
    def cap(cls, alpha: float, dim: int = 3) -> SphericalDomain:
        return cls(kind=DomainKind.CAP, alpha=alpha, dim=dim)

    @classmethod
    def polygon(cls, vertices: np.ndarray | list[Vec3]) -> SphericalDomain:
        return cls(
            kind=DomainKind.POLYGON,
            vertices=[tuple(float(c) for c in row) for row in np.asarray(vertices)],
            dim=3,
        )

    @classmethod
    def regular_polygon(cls, n: int, circumradius: float) -> SphericalDomain:
        """Regular n-gon around the north pole with vertices at colatitude ``circumradius``."""
        phi = 2.0 * np.pi * np.arange(n) / n
        s, c = np.sin(circumradius), np.cos(circumradius)
        return cls.polygon(np.column_stack([s * np.cos(phi), s * np.sin(phi), np.full(n, c)]))

    @classmethod
    def square(cls, side: float) -> SphericalDomain:
        """Geodesic square of the given side length centered at the north pole."""
        # a regular spherical quadrilateral with side s has circumradius R where
        # cos s = cos^2 R + sin^2 R cos(pi/2)
        return cls.regular_polygon(4, float(np.arccos(np.sqrt(np.cos(side)))))

    @cached_property
    def vertex_array(self) -> np.ndarray:
        if self.vertices is None:
            raise ValueError(f"{self.kind} domains have no vertices")
        return np.asarray(self.vertices, dtype=float)

    @cached_property
    def center(self) -> np.ndarray:
        """Reference point: arc midpoint, cap pole, or normalized vertex mean."""
        match self.kind:
            case DomainKind.ARC:
                return np.array([1.0, 0.0])
            case DomainKind.CAP:
                return np.eye(self.dim)[-1]
            case DomainKind.POLYGON:
                c = self.vertex_array.sum(axis=0)
                return c / np.linalg.norm(c)

    @property
    def is_axisymmetric(self) -> bool:
        return self.kind in (DomainKind.ARC, DomainKind.CAP)

    def label(self) -> str:
        if self.kind is DomainKind.POLYGON:
            return f"polygon[{len(self.vertex_array)}]"
        return f"{self.kind}({self.alpha:.10g})"


def _check_polygon(v: np.ndarray) -> None:
    n = len(v)
    dots = v @ v.T
    if np.any(dots[~np.eye(n, dtype=bool)] < -1.0 + 1e-9):
        raise ValueError("polygon vertices must be pairwise non-antipodal")
    center = v.sum(axis=0)
    center /= np.linalg.norm(center)
    if np.any(v @ center <= 1e-3):
        raise ValueError("polygon must lie in an open hemisphere")
    chart = gnomonic_chart(center)
    if polygon_self_intersects(chart.forward(v)):
        raise ValueError("polygon edges must not intersect")


class GnomonicChart:
    """Central projection onto the tangent plane at ``center``.

    Great circles map to straight lines, so geodesic polygons become planar ones.
    """

    def __init__(self, center: np.ndarray) -> None:
        self.center = center / np.linalg.norm(center)
        helper = np.eye(3)[int(np.argmin(np.abs(self.center)))]
        e1 = np.cross(self.center, helper)
        self.e1 = e1 / np.linalg.norm(e1)
        self.e2 = np.cross(self.center, self.e1)

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        z = x @ self.center
        return np.column_stack([x @ self.e1 / z, x @ self.e2 / z])

    def inverse(self, uv: np.ndarray) -> np.ndarray:
        uv = np.atleast_2d(uv)
        x = self.center + uv[:, :1] * self.e1 + uv[:, 1:2] * self.e2
        return x / np.linalg.norm(x, axis=1, keepdims=True)


def gnomonic_chart(center: np.ndarray) -> GnomonicChart:
    return GnomonicChart(np.asarray(center, dtype=float))


def polygon_self_intersects(uv: np.ndarray) -> bool:
    """Whether a closed planar polygon has two non-adjacent edges that meet."""
    n = len(uv)
    a, b = uv, np.roll(uv, -1, axis=0)

    def orient(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
        return float((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            d1 = orient(a[i], b[i], a[j])
            d2 = orient(a[i], b[i], b[j])
            d3 = orient(a[j], b[j], a[i])
            d4 = orient(a[j], b[j], b[i])
            if d1 * d2 <= 0 and d3 * d4 <= 0:
                return True
    return False


class FamilyDirection(StrEnum):
    INNER = "inner"
    OUTER = "outer"


class DomainFamily(BaseModel):
    """Shrunken (inner) or enlarged (outer) copies of a base domain."""

    model_config = ConfigDict(frozen=True)

    base: SphericalDomain
    direction: FamilyDirection
    steps: tuple[float, ...]

    @model_validator(mode="after")
    def _check_steps(self) -> Self:
        s = np.asarray(self.steps)
        if s.size == 0 or np.any(s <= 0):
            raise ValueError("family margins must be positive")
        if np.any(np.diff(s) >= 0):
            raise ValueError("family margins must be strictly decreasing")
        return self

    @classmethod
    def dyadic(
        cls,
        base: SphericalDomain,
        direction: FamilyDirection,
        delta0: float = 0.2,
        k_max: int = 6,
    ) -> DomainFamily:
        """Margins ``delta0 * 2**-k`` for k = 0..k_max."""
        steps = tuple(delta0 * 2.0**-k for k in range(k_max + 1))
        return cls(base=base, direction=direction, steps=steps)

    def members(self) -> list[SphericalDomain]:
        from .ops import expand, shrink

        op = shrink if self.direction is FamilyDirection.INNER else expand
        return [op(self.base, delta) for delta in self.steps]
