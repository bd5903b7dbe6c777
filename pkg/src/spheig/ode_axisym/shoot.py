from __future__ import annotations

from typing import Literal

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp

from spheig.errors import DegenerateWeight, IntegratorError
from spheig.geometry import PParams
from spheig.settings import settings

from .models import ColatGrid, ShootResult

Method = Literal["DOP853", "Radau", "RK45", "LSODA"]

POLE_START = 1e-6
REGULARIZATION_EPS = 1e-10


def ode_rhs(
    params: PParams,
    beta: float,
    theta: float,
    omega: float,
    omega_prime: float,
    eps: float = 0.0,
) -> tuple[float, float]:
    """First-order form of the axisymmetric profile equation.

    The flux ``sin^{N-2} q^{(p-2)/2} w'`` with ``q = beta^2 w^2 + w'^2`` is expanded
    so that ``w''`` is explicit; ``eps`` regularizes the weight as ``q + eps^2``.
    """
    p, n = params.p, params.dim
    lam = params.eigen_factor(beta)
    q = beta * beta * omega * omega + omega_prime * omega_prime
    denom = beta * beta * omega * omega + (p - 1.0) * omega_prime * omega_prime + eps * eps
    if denom == 0.0:
        if p < 2.0:
            raise DegenerateWeight(
                "profile and slope vanish together with p < 2",
                theta=theta,
                p=p,
            )
        return omega_prime, 0.0
    q_reg = q + eps * eps
    num = -lam * q_reg * omega - (p - 2.0) * beta * beta * omega * omega_prime * omega_prime
    if n > 2:
        num -= (n - 2.0) / np.tan(theta) * q_reg * omega_prime
    return omega_prime, num / denom


def pole_series(params: PParams, beta: float, theta: float) -> tuple[float, float]:
    """Regular expansion ``1 + c2 theta^2`` of a cap profile near the pole."""
    c2 = -params.eigen_factor(beta) / (2.0 * (params.dim - 1.0))
    return 1.0 + c2 * theta * theta, 2.0 * c2 * theta


def horizon(dim: int) -> float:
    """Largest colatitude the shooting integration may reach."""
    return 2.0 * np.pi if dim == 2 else np.pi - POLE_START


def shoot(
    params: PParams,
    beta: float,
    alpha: float,
    *,
    method: Method = "DOP853",
    rtol: float | None = None,
    atol: float | None = None,
    n_nodes: int = 401,
) -> ShootResult:
    """Integrate from theta = 0 until the profile first changes sign.

    Arcs (dim = 2) start from ``w(0) = 0, w'(0) = 1``; caps start from the pole
    series at ``theta0 = 1e-6``. ``first_zero`` is ``inf`` when no sign change
    occurs before the horizon.
    """
    if beta == 0.0:
        raise ValueError("beta must be nonzero")
    rtol = settings.ode_rtol if rtol is None else rtol
    atol = settings.ode_atol if atol is None else atol
    eps = REGULARIZATION_EPS if params.p < 2.0 else 0.0

    if params.dim == 2:
        t0, y0 = 0.0, (0.0, 1.0)
    else:
        t0, y0 = POLE_START, pole_series(params, beta, POLE_START)
    t_end = horizon(params.dim)

    activation = 0.0

    def rhs(theta: float, y: np.ndarray) -> tuple[float, float]:
        nonlocal activation
        if eps:
            q = beta * beta * y[0] * y[0] + y[1] * y[1]
            activation = max(activation, eps * eps / (q + eps * eps))
        return ode_rhs(params, beta, theta, float(y[0]), float(y[1]), eps)

    def crossing(theta: float, y: np.ndarray) -> float:
        return float(y[0])

    crossing.terminal = True  # type: ignore[attr-defined]
    crossing.direction = -1.0  # type: ignore[attr-defined]

    sol = solve_ivp(
        rhs,
        (t0, t_end),
        y0,
        method=method,
        rtol=rtol,
        atol=atol,
        events=crossing,
        dense_output=True,
    )
    if sol.status == -1:
        raise IntegratorError(
            f"integration failed at beta={beta:.12g}: {sol.message}",
            beta=beta,
            last_theta=float(sol.t[-1]),
        )
    if activation > 1e-6:
        logger.warning(
            "[shoot] weight regularization active (max share {:.2e}) at beta={}",
            activation,
            beta,
        )

    first_zero = float(sol.t_events[0][0]) if sol.t_events[0].size else np.inf
    reach = min(first_zero, float(sol.t[-1]))
    nodes = np.linspace(0.0, reach, n_nodes)
    inner = np.clip(nodes, t0, reach)
    y = sol.sol(inner)
    values, derivs = y[0].copy(), y[1].copy()
    if params.dim > 2:
        values[0], derivs[0] = 1.0, 0.0
    if np.isfinite(first_zero):
        values[-1] = 0.0
    endpoint = float(sol.sol(min(alpha, reach))[0]) if alpha <= reach else float(values[-1])
    logger.trace("[shoot] beta={} first zero {}", beta, first_zero)
    return ShootResult(
        first_zero=first_zero,
        endpoint_value=endpoint,
        trajectory=ColatGrid(alpha=reach, nodes=nodes, values=values, derivs=derivs, dim=params.dim),
        regularization=activation,
        steps=int(sol.t.size),
    )
