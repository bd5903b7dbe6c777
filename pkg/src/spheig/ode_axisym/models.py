from __future__ import annotations

from functools import cached_property

import numpy as np
from attrs import field, frozen
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.special import gamma


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^n."""
    return float(2.0 * np.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0))


def colatitude_density(theta: np.ndarray, dim: int) -> np.ndarray:
    """Surface density in colatitude coordinates: 1 on S^1, |S^{N-2}| sin^{N-2} otherwise."""
    if dim == 2:
        return np.ones_like(theta)
    return sphere_area(dim - 2) * np.sin(theta) ** (dim - 2)


@frozen
class ColatGrid:
    """Samples of an axisymmetric profile on [0, alpha].

    For arcs (dim = 2) theta runs along the arc from one endpoint; for caps it is
    the colatitude measured from the pole.
    """

    alpha: float
    nodes: np.ndarray = field(eq=False)
    values: np.ndarray = field(eq=False)
    derivs: np.ndarray = field(eq=False)
    dim: int

    def __attrs_post_init__(self) -> None:
        if self.nodes[0] != 0.0 or not np.isclose(self.nodes[-1], self.alpha, rtol=0, atol=1e-14):
            raise ValueError("grid must span [0, alpha]")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if self.values.shape != self.nodes.shape or self.derivs.shape != self.nodes.shape:
            raise ValueError("values and derivatives must match the nodes")

    @property
    def is_arc(self) -> bool:
        return self.dim == 2

    @cached_property
    def _spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.nodes, self.values, self.derivs)

    def evaluate(self, theta: np.ndarray | float) -> np.ndarray:
        return self._spline(np.clip(theta, 0.0, self.alpha))

    def derivative(self, theta: np.ndarray | float) -> np.ndarray:
        return self._spline(np.clip(theta, 0.0, self.alpha), 1)

    def density(self) -> np.ndarray:
        return colatitude_density(self.nodes, self.dim)

    def integrate(self, f: np.ndarray) -> float:
        """Integral over the domain of a function sampled at the nodes."""
        return float(simpson(f * self.density(), x=self.nodes))

    def l1_norm(self) -> float:
        return self.integrate(np.abs(self.values))

    def lp_norm(self, p: float) -> float:
        return self.integrate(np.abs(self.values) ** p) ** (1.0 / p)

    def scaled(self, factor: float) -> ColatGrid:
        return ColatGrid(
            alpha=self.alpha,
            nodes=self.nodes,
            values=factor * self.values,
            derivs=factor * self.derivs,
            dim=self.dim,
        )

    def interior(self) -> np.ndarray:
        """Mask of nodes where a Dirichlet profile is free (all but the boundary)."""
        mask = np.ones(self.nodes.shape, dtype=bool)
        mask[-1] = False
        if self.is_arc:
            mask[0] = False
        return mask


@frozen
class ShootResult:
    first_zero: float
    endpoint_value: float
    trajectory: ColatGrid
    regularization: float = 0.0
    steps: int = 0
