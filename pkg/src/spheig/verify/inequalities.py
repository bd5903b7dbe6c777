from __future__ import annotations

import numpy as np

from spheig.errors import RangeError
from spheig.fem_sphere import (
    DiscreteField,
    eigen_residual,
    element_weights,
    linearized_coefficients,
    mass_matrix,
    mesh_from_grid,
    stiffness_matrix,
)
from spheig.geometry import PParams
from spheig.models import Eigenpair
from spheig.ode_axisym import ColatGrid

from .models import CheckReport


def _safe_power(base: np.ndarray, exponent: float) -> np.ndarray:
    out = np.zeros_like(base)
    positive = base > 0.0
    out[positive] = base[positive] ** exponent
    return out


def vector_inequality_check(
    params: PParams, trials: int, *, rng: np.random.Generator | None = None
) -> CheckReport:
    """Monotonicity of ``A -> (gamma + |A|^2)^((p-2)/2) A`` for ``1 < p < 2``.

    Checks ``<F(B) - F(A), B - A> >= (p-1) |B-A|^2 (gamma + 1 + |A|^2 + |B|^2)^((p-2)/2)``
    for random ``gamma >= 0`` and vectors in dimension N - 1.
    """
    p = params.p
    if not 1.0 < p < 2.0:
        raise RangeError(f"the vector inequality needs 1 < p < 2, got p={p}", p=p)
    if trials < 1:
        raise RangeError("trials must be positive", trials=trials)
    rng = np.random.default_rng(0) if rng is None else rng
    d = params.dim - 1
    gamma = rng.exponential(1.0, trials) * (rng.random(trials) > 0.1)
    mag_a = 10.0 ** rng.uniform(-3.0, 2.0, (trials, 1))
    mag_b = 10.0 ** rng.uniform(-3.0, 2.0, (trials, 1))
    a = rng.standard_normal((trials, d)) * mag_a
    b = rng.standard_normal((trials, d)) * mag_b
    a[::97] = 0.0
    b[::89] = a[::89]
    e = (p - 2.0) / 2.0
    na, nb = np.einsum("ij,ij->i", a, a), np.einsum("ij,ij->i", b, b)
    fa = _safe_power(gamma + na, e)[:, None] * a
    fb = _safe_power(gamma + nb, e)[:, None] * b
    diff = b - a
    lhs = np.einsum("ij,ij->i", fb - fa, diff)
    rhs = (p - 1.0) * np.einsum("ij,ij->i", diff, diff) * (gamma + 1.0 + na + nb) ** e
    scale = np.abs(lhs) + np.abs(rhs) + np.finfo(float).tiny
    slack = (lhs - rhs) / scale
    violations = int(np.sum(slack < -1e-12))
    return CheckReport(
        name="vector-inequality",
        passed=violations == 0,
        worst_slack=float(np.min(slack)),
        statement="monotonicity of the regularized flux for 1<p<2",
        details={"p": p, "N": params.dim, "trials": trials, "violations": violations},
    )


def _energies(pair: Eigenpair) -> tuple[float, float, float, float]:
    """``int W |grad w|^2``, ``int W w^2``, ``int q^(p/2)`` and ``int |w|^p``."""
    p, beta = pair.params.p, pair.beta
    match pair.omega:
        case ColatGrid() as grid:
            w, dw = grid.values, grid.derivs
            q = beta * beta * w * w + dw * dw
            weight = _safe_power(q, (p - 2.0) / 2.0)
            return (
                grid.integrate(weight * dw * dw),
                grid.integrate(weight * w * w),
                grid.integrate(q ** (p / 2.0)),
                grid.integrate(np.abs(w) ** p),
            )
        case DiscreteField() as field_:
            mesh, w = field_.mesh, field_.values
            weight = element_weights(mesh, pair.params, beta, w, 0.0)
            mean, grad = mesh.mean_and_gradient(w)
            q = beta * beta * mean * mean + np.einsum("ed,ed->e", grad, grad)
            return (
                float(w @ (stiffness_matrix(mesh, weight) @ w)),
                float(w @ (mass_matrix(mesh, weight) @ w)),
                float(np.sum(mesh.weighted_measures * q ** (p / 2.0))),
                field_.lp_norm(p) ** p,
            )
    raise TypeError(f"unsupported profile {type(pair.omega).__name__}")


def energy_constant(params: PParams, beta: float) -> float:
    lam_plus = beta * beta + params.eigen_factor(beta)
    if params.p >= 2.0:
        return lam_plus ** (params.p / 2.0)
    return abs(beta) ** (params.p - 2.0) * lam_plus


def energy_identity_check(pair: Eigenpair, rtol: float = 1e-6) -> CheckReport:
    """Weak energy identity ``int W |grad w|^2 = lambda int W w^2`` and the Lp energy bound.

    The bound is ``int q^(p/2) <= C int |w|^p`` with ``C = (beta^2 + lambda)^(p/2)``
    for ``p >= 2`` and ``|beta|^(p-2) (beta^2 + lambda)`` below.
    """
    params = pair.params
    grad_energy, mass_energy, q_energy, lp_energy = _energies(pair)
    lam = params.eigen_factor(pair.beta)
    identity = abs(grad_energy - lam * mass_energy) / grad_energy
    bound = energy_constant(params, pair.beta) * lp_energy
    bound_slack = (bound - q_energy) / bound
    return CheckReport(
        name="energy-identity",
        passed=identity <= rtol and bound_slack >= -rtol,
        worst_slack=min(rtol - identity, bound_slack) / rtol,
        statement="weak energy identity and Lp energy bound",
        details={
            "p": params.p,
            "beta": pair.beta,
            "identity_error": identity,
            "bound_ratio": q_energy / bound,
        },
    )


def homogeneity_check(pair: Eigenpair, scale: float, rtol: float = 1e-10) -> CheckReport:
    """Residual of ``scale * w`` equals ``scale^(p-1)`` times the residual of ``w``."""
    if scale <= 0.0:
        raise RangeError("scale must be positive", scale=scale)
    params = pair.params
    if isinstance(pair.omega, ColatGrid):
        mesh, values = mesh_from_grid(pair.omega), pair.omega.values
    else:
        mesh, values = pair.omega.mesh, pair.omega.values
    base = eigen_residual(mesh, params, pair.beta, values)
    scaled = eigen_residual(mesh, params, pair.beta, scale * values)
    factor = scale ** (params.p - 1.0)
    weight = element_weights(mesh, params, pair.beta, values, 0.0)
    size = factor * float(np.max(np.abs(stiffness_matrix(mesh, weight) @ values)))
    err = float(np.max(np.abs(scaled - factor * base))) / size
    return CheckReport(
        name="homogeneity",
        passed=err <= rtol,
        worst_slack=(rtol - err) / rtol,
        statement="residual is homogeneous of degree p-1",
        details={"p": params.p, "scale": scale, "factor": factor, "error": err},
    )


def ellipticity_check(
    field_: DiscreteField,
    params: PParams,
    eps: float = 1e-3,
    *,
    rng: np.random.Generator | None = None,
) -> CheckReport:
    """Bounds of the linearized coefficients against one random direction per cell.

    ``min(1, p-1) s^((p-2)/2) |xi|^2 <= xi^T b xi <= max(1, p-1) s^((p-2)/2) |xi|^2``
    with ``s = |grad v|^2 + eps^2``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    mesh = field_.mesh
    b = linearized_coefficients(mesh, params, field_.values, eps)
    _, g = mesh.mean_and_gradient(field_.values)
    s = np.einsum("ed,ed->e", g, g) + eps * eps
    xi = rng.standard_normal(g.shape)
    form = np.einsum("ei,eij,ej->e", xi, b, xi)
    unit = s ** ((params.p - 2.0) / 2.0) * np.einsum("ed,ed->e", xi, xi)
    lo, hi = min(1.0, params.p - 1.0) * unit, max(1.0, params.p - 1.0) * unit
    slack = np.minimum(form - lo, hi - form) / unit
    violations = int(np.sum(slack < -1e-12))
    return CheckReport(
        name="ellipticity",
        passed=violations == 0,
        worst_slack=float(np.min(slack)),
        statement="linearized coefficients are uniformly elliptic",
        details={"p": params.p, "cells": mesh.n_cells, "violations": violations},
    )
