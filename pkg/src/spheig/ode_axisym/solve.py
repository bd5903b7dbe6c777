from __future__ import annotations

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from spheig.errors import BracketFailure, MonotonicityViolation
from spheig.geometry import DomainKind, PParams, SphericalDomain
from spheig.models import Branch, Eigenpair
from spheig.settings import settings

from .models import ColatGrid
from .shoot import Method, horizon, shoot

BETA_MIN = 1e-3
BETA_MAX = 50.0
SCAN_POINTS = 48


def first_zero(params: PParams, beta: float, alpha: float, method: Method = "DOP853") -> float:
    return shoot(params, beta, alpha, method=method, n_nodes=11).first_zero


def solve_beta(
    params: PParams,
    domain: SphericalDomain,
    branch: Branch,
    tol: float = 1e-10,
    *,
    method: Method = "DOP853",
    beta_range: tuple[float, float] = (BETA_MIN, BETA_MAX),
) -> Eigenpair:
    """Find the exponent whose principal profile first vanishes at ``alpha``.

    |beta| is scanned geometrically until the first zero crosses ``alpha``, the
    bracket is refined with Brent's method, and the profile is resampled on
    ``[0, alpha]`` and normalized to unit L1 mass.
    """
    if domain.kind not in (DomainKind.ARC, DomainKind.CAP):
        raise ValueError(f"shooting needs an arc or a cap, got {domain.kind}")
    if domain.dim != params.dim:
        raise ValueError(f"domain dimension {domain.dim} differs from N={params.dim}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    alpha = float(domain.alpha)
    sign = branch.sign
    cap = horizon(params.dim)

    def mismatch(mag: float) -> float:
        return min(first_zero(params, sign * mag, alpha, method), cap) - alpha

    scanned: list[tuple[float, float]] = []
    lo = hi = None
    for mag in np.geomspace(*beta_range, SCAN_POINTS):
        theta_star = first_zero(params, sign * mag, alpha, method)
        scanned.append((float(sign * mag), theta_star))
        if theta_star < alpha:
            hi = float(mag)
            break
        lo = float(mag)
    if hi is None or lo is None:
        raise BracketFailure(
            f"no sign change of theta*(beta) - alpha for {branch} branch on {domain.label()}",
            beta_range=[sign * beta_range[0], sign * beta_range[1]],
            scanned=scanned,
        )
    _check_first_zero_monotone(scanned, branch)

    mag = brentq(mismatch, lo, hi, xtol=tol, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    beta = sign * float(mag)
    result = shoot(params, beta, alpha, method=method, n_nodes=settings.ode_nodes)
    grid = _resample(result.trajectory, alpha, params.dim)
    grid = grid.scaled(1.0 / grid.l1_norm())
    residual = abs(result.first_zero - alpha)
    logger.debug(
        "[shoot] {} {} p={} N={}: beta={:.12g} (|theta*-alpha|={:.1e})",
        branch,
        domain.label(),
        params.p,
        params.dim,
        beta,
        residual,
    )
    return Eigenpair(
        beta=beta,
        omega=grid,
        branch=branch,
        residual_norm=residual,
        iterations=len(scanned),
        params=params,
        domain=domain,
        extras={"regularization": result.regularization, "bracket": (sign * lo, sign * hi)},
    )


def _check_first_zero_monotone(scanned: list[tuple[float, float]], branch: Branch) -> None:
    finite = [(b, t) for b, t in scanned if np.isfinite(t)]
    for (b0, t0), (b1, t1) in zip(finite, finite[1:], strict=False):
        if t1 >= t0:
            raise MonotonicityViolation(
                f"first zero is not decreasing in |beta| on the {branch} branch",
                betas=[b0, b1],
                first_zeros=[t0, t1],
            )


def _resample(trajectory: ColatGrid, alpha: float, dim: int) -> ColatGrid:
    nodes = np.linspace(0.0, alpha, settings.ode_nodes)
    if trajectory.alpha < alpha:
        # the root lies within tolerance of alpha, evaluate on the reachable part
        nodes = nodes * (trajectory.alpha / alpha)
    values = trajectory.evaluate(nodes)
    derivs = trajectory.derivative(nodes)
    values[-1] = 0.0
    return ColatGrid(
        alpha=alpha,
        nodes=np.linspace(0.0, alpha, settings.ode_nodes),
        values=values,
        derivs=derivs,
        dim=dim,
    )
