from __future__ import annotations

from collections.abc import Callable

import numpy as np
from attrs import define, field
from loguru import logger
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.linalg import splu
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from spheig.errors import BracketFailure, EigenIterError, PicardError
from spheig.geometry import PParams, SphericalDomain
from spheig.models import Branch, Eigenpair
from spheig.ode_axisym import ColatGrid
from spheig.settings import settings

from .assembly import assemble_weighted, eigen_residual, mass_matrix, stiffness_matrix
from .mesh import DiscreteField, SurfaceMesh, mesh_from_grid


def frozen_eigen_mu(
    mesh: SurfaceMesh,
    params: PParams,
    beta: float,
    omega_frozen: DiscreteField,
    eps: float,
    *,
    tol: float = 1e-12,
    max_iter: int = 500,
) -> tuple[float, DiscreteField]:
    """Principal eigenpair of the frozen-weight problem ``K v = mu M v``.

    Inverse iteration on the interior nodes started from ``omega_frozen``; the
    eigenvector is returned positive with unit L1 mass.
    """
    k_mat, m_mat = assemble_weighted(mesh, params, beta, omega_frozen, eps)
    inner = np.flatnonzero(mesh.interior)
    k_ii = k_mat[inner][:, inner].tocsc()
    m_ii = m_mat[inner][:, inner].tocsr()
    lu = splu(k_ii)

    x = np.abs(omega_frozen.values[inner]) + 1e-3 * np.max(np.abs(omega_frozen.values))
    x /= np.sqrt(x @ (m_ii @ x))
    mu = float(x @ (k_ii @ x))
    for it in range(1, max_iter + 1):
        y = lu.solve(m_ii @ x)
        norm = np.sqrt(y @ (m_ii @ y))
        if not np.isfinite(norm) or norm == 0.0:
            raise EigenIterError("inverse iteration broke down", beta=beta, iteration=it)
        y /= norm
        mu_next = float(y @ (k_ii @ y))
        change = np.max(np.abs(y - x))
        x = y
        if abs(mu_next - mu) <= tol * abs(mu_next) and change <= np.sqrt(tol):
            mu = mu_next
            break
        mu = mu_next
    else:
        raise EigenIterError(
            "inverse iteration stagnated",
            beta=beta,
            iterations=max_iter,
            mu=mu,
        )

    full = np.zeros(mesh.n_vertices)
    full[inner] = x if x.sum() >= 0 else -x
    field_ = DiscreteField(mesh, full)
    return mu, field_.scaled(1.0 / field_.l1_norm())


@define
class PicardState:
    """Warm start shared by successive principal-eigenvalue evaluations."""

    omega: DiscreteField
    iterations: int = 0
    clipped: int = 0
    history: list[tuple[float, float]] = field(factory=list)


def principal_mu(
    mesh: SurfaceMesh,
    params: PParams,
    beta: float,
    state: PicardState,
    eps: float,
    tol: float,
) -> float:
    """Fixed point of ``frozen_eigen_mu`` by damped Picard iteration.

    Retries with halved damping when the iteration does not settle.
    """
    damping = settings.picard_damping
    start = state.omega
    for attempt in Retrying(
        stop=stop_after_attempt(settings.picard_retries),
        retry=retry_if_exception_type((PicardError, EigenIterError)),
        reraise=True,
    ):
        with attempt:
            state.omega = start
            mu = _picard(mesh, params, beta, state, eps, tol, damping)
        if attempt.retry_state.outcome is not None and attempt.retry_state.outcome.failed:
            damping /= 2.0
            logger.warning("[picard] retrying beta={} with damping {}", beta, damping)
    state.history.append((beta, mu))
    return mu


def _picard(
    mesh: SurfaceMesh,
    params: PParams,
    beta: float,
    state: PicardState,
    eps: float,
    tol: float,
    damping: float,
) -> float:
    omega = state.omega
    mu = np.nan
    for it in range(1, settings.picard_max_iter + 1):
        mu, target = frozen_eigen_mu(mesh, params, beta, omega, eps)
        mixed = (1.0 - damping) * omega.values + damping * target.values
        negative = mixed < 0.0
        if np.any(negative):
            state.clipped += int(negative.sum())
            logger.warning("[picard] clipped {} negative nodal values", int(negative.sum()))
            mixed[negative] = 0.0
        nxt = DiscreteField(mesh, mixed)
        nxt = nxt.scaled(1.0 / nxt.l1_norm())
        change = np.max(np.abs(nxt.values - omega.values)) / np.max(np.abs(nxt.values))
        omega = nxt
        state.iterations += 1
        if change < tol:
            state.omega = omega
            return float(mu)
    state.omega = omega
    raise PicardError(
        f"Picard iteration did not settle in {settings.picard_max_iter} steps",
        beta=beta,
        damping=damping,
        mu=float(mu),
    )


def dirichlet_eigen(mesh: SurfaceMesh) -> tuple[float, DiscreteField]:
    """First Dirichlet Laplace-Beltrami eigenpair (unit weights)."""
    start = DiscreteField(mesh, np.where(mesh.boundary, 0.0, 1.0))
    return frozen_eigen_mu(mesh, PParams(p=2.0, dim=3), 1.0, start, 0.0)


def _guess_magnitude(params: PParams, mu0: float, branch: Branch) -> float:
    b0 = params.beta0
    disc = np.sqrt(b0 * b0 + 4.0 * mu0 / (params.p - 1.0))
    return abs((b0 + branch.sign * disc) / 2.0)


def solve_nonlinear(
    mesh: SurfaceMesh,
    params: PParams,
    domain: SphericalDomain,
    branch: Branch,
    tol: float = 1e-8,
    *,
    eps: float | None = None,
    initial: DiscreteField | None = None,
    bracket: tuple[float, float] | None = None,
) -> Eigenpair:
    """Exponent from the scalar equation ``mu_1(beta) = (p-1) beta (beta - beta0)``.

    ``mu_1`` is the Picard fixed point of the frozen-weight eigenproblem; ``eps``
    defaults to ``fem_eps0 * h``.
    """
    if domain.dim != params.dim:
        raise ValueError(f"domain dimension {domain.dim} differs from N={params.dim}")
    eps = settings.fem_eps0 * mesh.h if eps is None else eps
    mu0, omega0 = dirichlet_eigen(mesh)
    state = PicardState(omega=initial if initial is not None else omega0)
    sign = branch.sign
    picard_tol = max(tol, 1e-10)

    def g(mag: float) -> float:
        beta = sign * mag
        return principal_mu(mesh, params, beta, state, eps, picard_tol) - params.eigen_factor(beta)

    lo, hi = (
        (abs(bracket[0]), abs(bracket[1]))
        if bracket is not None
        else _expand_bracket(g, _guess_magnitude(params, mu0, branch), branch, domain)
    )
    mag = brentq(g, min(lo, hi), max(lo, hi), xtol=tol, rtol=4.0 * np.finfo(float).eps)
    beta = sign * float(mag)
    mu = principal_mu(mesh, params, beta, state, eps, picard_tol)
    omega = state.omega
    residual = evaluate_residual(mesh, params, beta, omega)
    logger.debug(
        "[picard] {} {} p={}: beta={:.10g} mu={:.10g} residual={:.2e} ({} Picard steps)",
        branch,
        domain.label(),
        params.p,
        beta,
        mu,
        residual,
        state.iterations,
    )
    return Eigenpair(
        beta=beta,
        omega=omega,
        branch=branch,
        residual_norm=residual,
        iterations=state.iterations,
        params=params,
        domain=domain,
        extras={"mu": mu, "eps": eps, "h": mesh.h, "clipped": state.clipped},
    )


def _expand_bracket(
    g: Callable[[float], float], guess: float, branch: Branch, domain: SphericalDomain
) -> tuple[float, float]:
    a = guess
    ga = g(a)
    factor = 1.25 if ga > 0 else 0.8
    tried = [a]
    for _ in range(30):
        b = a * factor
        gb = g(b)
        tried.append(b)
        if np.sign(gb) != np.sign(ga):
            return a, b
        a, ga = b, gb
    raise BracketFailure(
        f"no sign change of mu_1(beta) - lambda(beta) on {domain.label()} ({branch})",
        scanned=[branch.sign * t for t in tried],
    )


def _riesz_operator(mesh: SurfaceMesh) -> sparse.csc_matrix:
    inner = np.flatnonzero(mesh.interior)
    a = stiffness_matrix(mesh) + mass_matrix(mesh)
    return a[inner][:, inner].tocsc()


def evaluate_residual(
    mesh_or_grid: SurfaceMesh | ColatGrid,
    params: PParams,
    beta: float,
    omega: DiscreteField | ColatGrid | np.ndarray,
) -> float:
    """Discrete dual norm ``sqrt(r^T (K0 + M0)^{-1} r)`` of the weak residual."""
    if isinstance(mesh_or_grid, ColatGrid):
        mesh = mesh_from_grid(mesh_or_grid)
    else:
        mesh = mesh_or_grid
    match omega:
        case DiscreteField():
            values = omega.values
        case ColatGrid():
            values = omega.values
        case _:
            values = np.asarray(omega, dtype=float)
    r = eigen_residual(mesh, params, beta, values)[mesh.interior]
    z = splu(_riesz_operator(mesh)).solve(r)
    return float(np.sqrt(max(r @ z, 0.0)))


def extrapolate_eps(
    mesh: SurfaceMesh,
    params: PParams,
    domain: SphericalDomain,
    branch: Branch,
    tol: float = 1e-8,
) -> dict[str, float]:
    """Exponents at ``eps`` and ``eps / 2`` and their linear extrapolation to zero."""
    eps = settings.fem_eps0 * mesh.h
    coarse = solve_nonlinear(mesh, params, domain, branch, tol, eps=eps)
    fine = solve_nonlinear(
        mesh, params, domain, branch, tol, eps=eps / 2.0, initial=coarse.omega
    )
    return {
        "eps": eps,
        "beta_eps": coarse.beta,
        "beta_half_eps": fine.beta,
        "beta_extrapolated": 2.0 * fine.beta - coarse.beta,
    }


def latitude_variation(field: DiscreteField, pole: np.ndarray, decimals: int = 8) -> float:
    """Largest spread of nodal values along a latitude circle, relative to the maximum."""
    theta = np.round(np.arccos(np.clip(field.mesh.points @ pole, -1.0, 1.0)), decimals)
    spread = 0.0
    for t in np.unique(theta):
        ring = field.values[theta == t]
        if ring.size > 1:
            spread = max(spread, float(ring.max() - ring.min()))
    return spread / float(np.max(np.abs(field.values)))
