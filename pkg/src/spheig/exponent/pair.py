from __future__ import annotations

import numpy as np
from attrs import frozen

from spheig.errors import PositivityError
from spheig.geometry import PParams, SphericalDomain, expand, shrink
from spheig.models import Branch, Eigenpair
from spheig.ode_axisym import ColatGrid, solve_beta
from spheig.utils import map_concurrent


def transplant(grid: ColatGrid, alpha: float) -> ColatGrid:
    """Carry a profile to the opening ``alpha`` by rescaling the colatitude.

    The result keeps the node count, vanishes at ``alpha`` and has unit L1 mass.
    """
    scale = alpha / grid.alpha
    moved = ColatGrid(
        alpha=alpha,
        nodes=grid.nodes * scale,
        values=grid.values.copy(),
        derivs=grid.derivs / scale,
        dim=grid.dim,
    )
    return moved.scaled(1.0 / moved.l1_norm())


@frozen
class EigenPairing:
    """Two positive profiles on one grid with ``omega >= omega_prime`` and contact."""

    omega: ColatGrid
    omega_prime: ColatGrid
    inner: Eigenpair
    outer: Eigenpair
    delta1: float


def order_pair(omega: ColatGrid, omega_prime: ColatGrid) -> tuple[ColatGrid, float]:
    """Rescale ``omega_prime`` so that ``sup omega_prime / omega = 1``; returns it with delta_1."""
    mask = omega.interior()
    a, b = omega.values[mask], omega_prime.values[mask]
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise PositivityError("profiles must be positive at interior nodes")
    ratio = b / a
    scaled = omega_prime.scaled(1.0 / float(ratio.max()))
    return scaled, float(ratio.min() / ratio.max())


def eigenfunction_pair(
    domain: SphericalDomain,
    params: PParams,
    branch: Branch = Branch.SINGULAR,
    delta: float = 0.1,
    tol: float = 1e-10,
) -> EigenPairing:
    """Inner and outer eigenfunctions carried onto ``domain`` and ordered.

    ``omega`` comes from the domain shrunk by ``delta``, ``omega_prime`` from the
    domain enlarged by ``delta``.
    """
    if not domain.is_axisymmetric:
        raise ValueError("eigenfunction pairs are built on arcs and caps")
    members = [shrink(domain, delta), expand(domain, delta)]
    inner, outer = map_concurrent(lambda m: solve_beta(params, m, branch, tol), members)
    omega = transplant(inner.omega, domain.alpha)
    candidate = transplant(outer.omega, domain.alpha)
    candidate = ColatGrid(
        alpha=domain.alpha,
        nodes=omega.nodes,
        values=candidate.evaluate(omega.nodes),
        derivs=candidate.derivative(omega.nodes),
        dim=domain.dim,
    )
    omega_prime, delta1 = order_pair(omega, candidate)
    return EigenPairing(
        omega=omega, omega_prime=omega_prime, inner=inner, outer=outer, delta1=delta1
    )
