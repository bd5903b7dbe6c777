from __future__ import annotations

import numpy as np
from loguru import logger
from matplotlib.path import Path as PlanarPath
from scipy.optimize import minimize

from spheig.errors import (
    ComplementPolar,
    EmptyDomain,
    OutsideDomain,
    SelfIntersection,
)

from .models import DomainKind, SphericalDomain, gnomonic_chart, polygon_self_intersects

_INSIDE_SLACK = 1e-10


def shrink(domain: SphericalDomain, delta: float) -> SphericalDomain:
    """Points of ``domain`` farther than ``delta`` from its boundary."""
    if delta < 0:
        raise ValueError(f"shrink margin must be nonnegative, got {delta}")
    if delta == 0:
        return domain
    r_in = inradius(domain)
    if delta >= r_in:
        raise EmptyDomain(
            f"shrinking {domain.label()} by {delta:g} empties it",
            delta=delta,
            inradius=r_in,
        )
    match domain.kind:
        case DomainKind.ARC:
            return SphericalDomain.arc(domain.alpha - 2.0 * delta)
        case DomainKind.CAP:
            return SphericalDomain.cap(domain.alpha - delta, domain.dim)
        case DomainKind.POLYGON:
            return _offset_polygon(domain, delta, inward=True)


def expand(domain: SphericalDomain, delta: float) -> SphericalDomain:
    """The ``delta``-neighborhood of the closure of ``domain``."""
    if delta < 0:
        raise ValueError(f"expand margin must be nonnegative, got {delta}")
    if delta == 0:
        return domain
    match domain.kind:
        case DomainKind.ARC:
            alpha = domain.alpha + 2.0 * delta
            if alpha >= 2.0 * np.pi:
                raise ComplementPolar(
                    f"expanding {domain.label()} by {delta:g} covers the circle",
                    delta=delta,
                )
            return SphericalDomain.arc(alpha)
        case DomainKind.CAP:
            alpha = domain.alpha + delta
            if alpha >= np.pi:
                raise ComplementPolar(
                    f"expanding {domain.label()} by {delta:g} covers the sphere",
                    delta=delta,
                )
            return SphericalDomain.cap(alpha, domain.dim)
        case DomainKind.POLYGON:
            return _offset_polygon(domain, delta, inward=False)


def expansion_room(domain: SphericalDomain) -> float:
    """Margin below which ``expand`` keeps the complement nonempty.

    Exact for arcs and caps. For polygons it bounds the vertex travel by the
    distance to the chart hemisphere, scaled by ``sin(gamma / 2)``.
    """
    match domain.kind:
        case DomainKind.ARC:
            return np.pi - domain.alpha / 2.0
        case DomainKind.CAP:
            return np.pi - domain.alpha
        case DomainKind.POLYGON:
            v = domain.vertex_array
            to_edge = np.pi / 2.0 - np.arccos(np.clip(v @ domain.center, -1.0, 1.0))
            return float(np.min(to_edge * np.sin(interior_angles(v) / 2.0)))


def interior_angles(vertices: np.ndarray) -> np.ndarray:
    """Interior angle at each vertex of a counter-clockwise geodesic polygon."""
    prev_v = np.roll(vertices, 1, axis=0)
    next_v = np.roll(vertices, -1, axis=0)
    t_prev = _tangent_towards(vertices, prev_v)
    t_next = _tangent_towards(vertices, next_v)
    sin_part = np.einsum("ij,ij->i", vertices, np.cross(t_next, t_prev))
    cos_part = np.einsum("ij,ij->i", t_next, t_prev)
    return np.mod(np.arctan2(sin_part, cos_part), 2.0 * np.pi)


def _tangent_towards(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    t = y - np.einsum("ij,ij->i", x, y)[:, None] * x
    return t / np.linalg.norm(t, axis=1, keepdims=True)


def _offset_polygon(
    domain: SphericalDomain, delta: float, *, inward: bool
) -> SphericalDomain:
    v = domain.vertex_array
    gamma = interior_angles(v)
    t_next = _tangent_towards(v, np.roll(v, -1, axis=0))
    half = gamma / 2.0
    bisector = np.cos(half)[:, None] * t_next + np.sin(half)[:, None] * np.cross(v, t_next)
    ratio = np.sin(delta) / np.sin(half)
    if np.any(ratio >= 1.0):
        raise EmptyDomain(
            f"offset {delta:g} exceeds what the vertex angles of {domain.label()} allow",
            delta=delta,
        )
    # vertex travel d with sin(delta) = sin(d) sin(gamma / 2) keeps it delta away
    # from both adjacent edge circles
    travel = np.arcsin(ratio)
    sign = 1.0 if inward else -1.0
    moved = np.cos(travel)[:, None] * v + sign * np.sin(travel)[:, None] * bisector
    moved /= np.linalg.norm(moved, axis=1, keepdims=True)

    center = domain.center
    if np.any(moved @ center <= 1e-3):
        raise ComplementPolar(
            f"expanding {domain.label()} by {delta:g} leaves the chart hemisphere",
            delta=delta,
        )
    if polygon_self_intersects(gnomonic_chart(center).forward(moved)):
        raise SelfIntersection(
            f"offsetting {domain.label()} by {delta:g} produces crossing edges",
            delta=delta,
            inward=inward,
        )
    logger.trace("[geometry] offset polygon by {} (inward={})", delta, inward)
    return SphericalDomain.polygon(moved)


def contains(domain: SphericalDomain, sigma: np.ndarray, slack: float = _INSIDE_SLACK) -> np.ndarray:
    """Vectorized membership test for points of the closed domain."""
    x = np.atleast_2d(np.asarray(sigma, dtype=float))
    match domain.kind:
        case DomainKind.ARC:
            phi = np.arctan2(x[:, 1], x[:, 0])
            return np.abs(phi) <= domain.alpha / 2.0 + slack
        case DomainKind.CAP:
            theta = np.arccos(np.clip(x[:, -1], -1.0, 1.0))
            return theta <= domain.alpha + slack
        case DomainKind.POLYGON:
            return _polygon_distance_signed(domain, x) >= -slack


def boundary_distance(domain: SphericalDomain, sigma: np.ndarray) -> float:
    """Geodesic distance from a point of the closed domain to its boundary."""
    x = np.asarray(sigma, dtype=float)
    if x.shape != (domain.dim,):
        raise ValueError(f"expected a point of S^{domain.dim - 1}, got shape {x.shape}")
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise ValueError("sigma must be a unit vector")
    match domain.kind:
        case DomainKind.ARC:
            dist = domain.alpha / 2.0 - abs(float(np.arctan2(x[1], x[0])))
        case DomainKind.CAP:
            dist = domain.alpha - float(np.arccos(np.clip(x[-1], -1.0, 1.0)))
        case DomainKind.POLYGON:
            dist = float(_polygon_distance_signed(domain, x[None, :])[0])
    if dist < -_INSIDE_SLACK:
        raise OutsideDomain(
            f"point lies outside {domain.label()}", sigma=x.tolist(), distance=dist
        )
    return max(dist, 0.0)


def boundary_distances(domain: SphericalDomain, points: np.ndarray) -> np.ndarray:
    """Signed distances for many points (negative outside), no membership check."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    match domain.kind:
        case DomainKind.ARC:
            return domain.alpha / 2.0 - np.abs(np.arctan2(x[:, 1], x[:, 0]))
        case DomainKind.CAP:
            return domain.alpha - np.arccos(np.clip(x[:, -1], -1.0, 1.0))
        case DomainKind.POLYGON:
            return _polygon_distance_signed(domain, x)


def _polygon_distance_signed(domain: SphericalDomain, x: np.ndarray) -> np.ndarray:
    v = domain.vertex_array
    w = np.roll(v, -1, axis=0)
    dist = np.full(len(x), np.inf)
    for a, b in zip(v, w, strict=True):
        dist = np.minimum(dist, segment_distance(x, a, b))
    chart = gnomonic_chart(domain.center)
    front = x @ chart.center > 1e-6
    inside = np.zeros(len(x), dtype=bool)
    if np.any(front):
        path = PlanarPath(chart.forward(v), closed=False)
        inside[front] = path.contains_points(chart.forward(x[front]), radius=0.0)
    return np.where(inside | (dist < _INSIDE_SLACK), dist, -dist)


def segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geodesic distance from points ``x`` to the minor great-circle arc ``ab``."""
    n = np.cross(a, b)
    n /= np.linalg.norm(n)
    off = x @ n
    foot = x - off[:, None] * n
    norm = np.linalg.norm(foot, axis=1)
    ok = norm > 1e-14
    foot[ok] /= norm[ok, None]
    within = ok & (np.cross(a, foot) @ n >= 0.0) & (np.cross(foot, b) @ n >= 0.0)
    to_circle = np.arcsin(np.clip(np.abs(off), 0.0, 1.0))
    to_ends = np.minimum(
        np.arccos(np.clip(x @ a, -1.0, 1.0)), np.arccos(np.clip(x @ b, -1.0, 1.0))
    )
    return np.where(within, to_circle, to_ends)


def incenter(domain: SphericalDomain) -> np.ndarray:
    """A point at maximal boundary distance."""
    match domain.kind:
        case DomainKind.ARC | DomainKind.CAP:
            return domain.center
        case DomainKind.POLYGON:
            return _polygon_incenter(domain)[0]


def inradius(domain: SphericalDomain) -> float:
    match domain.kind:
        case DomainKind.ARC:
            return domain.alpha / 2.0
        case DomainKind.CAP:
            return domain.alpha
        case DomainKind.POLYGON:
            return _polygon_incenter(domain)[1]


def _polygon_incenter(domain: SphericalDomain) -> tuple[np.ndarray, float]:
    chart = gnomonic_chart(domain.center)
    uv = chart.forward(domain.vertex_array)
    lo, hi = uv.min(axis=0), uv.max(axis=0)
    grid = np.stack(
        np.meshgrid(np.linspace(lo[0], hi[0], 41), np.linspace(lo[1], hi[1], 41)), axis=-1
    ).reshape(-1, 2)
    d = _polygon_distance_signed(domain, chart.inverse(grid))
    start = grid[int(np.argmax(d))]

    def objective(z: np.ndarray) -> float:
        return -float(_polygon_distance_signed(domain, chart.inverse(z))[0])

    res = minimize(objective, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
    best = res.x if -res.fun >= d.max() else start
    point = chart.inverse(best)[0]
    return point, float(_polygon_distance_signed(domain, point[None, :])[0])
