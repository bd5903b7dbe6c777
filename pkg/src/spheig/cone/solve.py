from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np
from loguru import logger
from scipy.optimize import least_squares
from scipy.sparse.linalg import splu
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from spheig.errors import ConeSolveError, FitError
from spheig.fem_sphere import (
    DiscreteField,
    arc_mesh,
    assemble_linearized,
    eigen_residual,
    mass_matrix,
    meridian_mesh,
    p_laplacian_residual,
    stiffness_matrix,
)
from spheig.geometry import PParams
from spheig.ode_axisym import ColatGrid
from spheig.settings import settings

from .domain import ConeDomain, ConeField, ConeGrid, cone_grid, cone_grid_spaced
from .models import ConsistencyReport, DecayFit, MonotoneReport

InnerData = np.ndarray | Callable[[np.ndarray], np.ndarray]

STEP_TOL = 1e-9
PICARD_STEPS = 12


def trace_from_profile(profile: ColatGrid | np.ndarray, theta: np.ndarray, a: float, beta: float) -> np.ndarray:
    """Inner boundary data ``a^-beta * profile(theta)``."""
    values = profile.evaluate(theta) if isinstance(profile, ColatGrid) else np.asarray(profile)
    return a ** (-beta) * values


def _data_on(grid: ConeGrid, inner_data: InnerData) -> np.ndarray:
    data = inner_data(grid.theta) if callable(inner_data) else np.asarray(inner_data, dtype=float)
    if data.shape != grid.theta.shape:
        raise ValueError("inner data must give one value per section angle")
    if np.any(data < -1e-12 * max(1.0, float(np.max(np.abs(data))))):
        raise ValueError("inner data must be nonnegative")
    data = np.clip(data, 0.0, None)
    data[-1] = 0.0
    if grid.cone.is_planar:
        data[0] = 0.0
    return data


def _solve_linear(matrix, rhs_full: np.ndarray, u: np.ndarray, free: np.ndarray) -> np.ndarray:  # noqa: ANN001
    out = u.copy()
    a_ff = matrix[free][:, free].tocsc()
    a_fd = matrix[free][:, ~free]
    out[free] = splu(a_ff).solve(rhs_full[free] - a_fd @ u[~free])
    return out


def _regularization(grid: ConeGrid, values: np.ndarray, eps0: float) -> np.ndarray:
    """Cellwise ``eps0 * mean(u) / mean(r)`` so the weight guard scales with the field."""
    mesh = grid.mesh
    r_bar = np.linalg.norm(mesh.vertices[mesh.cells].mean(axis=1), axis=1)
    u_bar = np.abs(values[mesh.cells].mean(axis=1))
    floor = 1e-12 * float(np.max(np.abs(values))) / grid.cone.a
    return eps0 * np.maximum(u_bar / r_bar, floor)


def solve_truncated(
    cone: ConeDomain,
    params: PParams,
    inner_data: InnerData,
    outer_zero: bool = True,
    *,
    grid: ConeGrid | None = None,
    n_r: int | None = None,
    n_theta: int | None = None,
) -> ConeField:
    """Discrete p-harmonic function on the truncated cone.

    Matches ``inner_data`` on r = a, vanishes on the lateral boundary and, when
    ``outer_zero``, on r = b (otherwise r = b carries the natural condition).
    Damped Picard steps on frozen weights are followed by Newton iterations with
    the linearized operator.
    """
    grid = cone_grid(cone, n_r, n_theta) if grid is None else grid
    data = _data_on(grid, inner_data)
    n_t = len(grid.theta)
    u = np.zeros(grid.mesh.n_vertices)
    if not np.any(data > 0.0):
        return ConeField(grid=grid, values=u, outer_zero=outer_zero)
    u[:n_t] = data
    free = ~grid.dirichlet(outer_zero)

    damping = settings.picard_damping
    for attempt in Retrying(
        stop=stop_after_attempt(settings.picard_retries),
        retry=retry_if_exception_type(ConeSolveError),
        reraise=True,
    ):
        with attempt:
            values = _picard_newton(grid, params, u, free, damping)
        if attempt.retry_state.outcome is not None and attempt.retry_state.outcome.failed:
            damping /= 2.0
            logger.warning("[cone] retrying truncated solve with damping {}", damping)
    return ConeField(grid=grid, values=values, outer_zero=outer_zero)


def _picard_newton(
    grid: ConeGrid, params: PParams, u0: np.ndarray, free: np.ndarray, damping: float
) -> np.ndarray:
    mesh = grid.mesh
    zero = np.zeros(mesh.n_vertices)
    u = _solve_linear(stiffness_matrix(mesh), zero, u0, free)
    if params.p == 2.0:
        return u

    eps0 = settings.fem_eps0
    for _ in range(PICARD_STEPS):
        eps = _regularization(grid, u, eps0)
        _, g = mesh.mean_and_gradient(u)
        s = np.einsum("ed,ed->e", g, g) + eps**2
        w = s ** ((params.p - 2.0) / 2.0)
        nxt = _solve_linear(stiffness_matrix(mesh, w), zero, u, free)
        change = np.max(np.abs(nxt - u)) / np.max(np.abs(nxt))
        u = (1.0 - damping) * u + damping * nxt
        if change < 1e-3:
            break

    eps = _regularization(grid, u, eps0)
    scale = float(np.max(np.abs(u)))
    for it in range(1, settings.newton_max_iter + 1):
        res = p_laplacian_residual(mesh, params, u, eps)
        jac = assemble_linearized(mesh, params, DiscreteField(mesh, u), eps)
        step = np.zeros_like(u)
        try:
            step[free] = splu(jac[free][:, free].tocsc()).solve(-res[free])
        except RuntimeError as e:
            raise ConeSolveError("singular Newton system", iteration=it) from e
        norm0 = np.linalg.norm(res[free])
        t = 1.0
        while t > 1.0 / 64.0:
            trial = u + t * step
            if np.linalg.norm(p_laplacian_residual(mesh, params, trial, eps)[free]) <= (1.0 - 1e-4 * t) * norm0:
                break
            t /= 2.0
        u = u + t * step
        rel = t * np.max(np.abs(step)) / scale
        logger.trace("[cone] Newton step {}: |R|={:.3e} step={:.3e}", it, norm0, rel)
        if rel <= STEP_TOL or norm0 == 0.0:
            return u
    raise ConeSolveError(
        f"Newton iteration did not converge in {settings.newton_max_iter} steps",
        p=params.p,
        last_step=float(rel),
    )


def decay_fit(field: ConeField, theta0: float | None = None) -> DecayFit:
    """Decay exponent from ``ln u`` against ``ln r`` over the middle third of [a, b].

    With a zero outer condition the outer layer is modeled as
    ``ln u = c - beta s + ln(1 - exp(kappa (s - ln b)))``; the plain slope is the
    fallback.
    """
    cone = field.cone
    if theta0 is None:
        theta0 = cone.alpha / 2.0 if cone.is_planar else 0.0
    r, u, theta_used = field.ray(theta0)
    s = np.log(r)
    s_a, s_b = np.log(cone.a), np.log(cone.b)
    span = s_b - s_a
    window = (s >= s_a + span / 3.0 - 1e-12) & (s <= s_a + 2.0 * span / 3.0 + 1e-12)
    if window.sum() < 3:
        raise FitError("fit window holds fewer than three radii", radii=int(window.sum()))
    sw, uw = s[window], u[window]
    if np.any(uw <= 0.0):
        raise FitError(
            "nonpositive samples in the fit window",
            theta0=theta_used,
            r=r[window][uw <= 0.0].tolist(),
        )
    slope, intercept = np.polyfit(sw, np.log(uw), 1)
    plain = DecayFit(
        beta_fit=float(-slope),
        r_min=float(r[window][0]),
        r_max=float(r[window][-1]),
        theta0=theta_used,
    )
    if not field.outer_zero:
        return plain

    def model(x: np.ndarray) -> np.ndarray:
        c, beta, kappa = x
        return c - beta * sw + np.log1p(-np.exp(kappa * (sw - s_b))) - np.log(uw)

    x0 = np.array([intercept, -slope, 2.0 * max(abs(slope), 0.1)])
    try:
        sol = least_squares(model, x0, bounds=([-np.inf, -np.inf, 1e-3], [np.inf, np.inf, 20.0]))
    except ValueError:
        sol = None
    if sol is None or not sol.success or not np.isfinite(sol.x).all():
        logger.warning("[cone] truncation-layer fit failed, using plain slope")
        return plain
    return plain.model_copy(
        update={"beta_fit": float(sol.x[1]), "kappa": float(sol.x[2]), "truncation_model": True}
    )


def separable_consistency(
    cone: ConeDomain,
    params: PParams,
    profile: ColatGrid,
    beta: float,
    *,
    n_r: int | None = None,
    n_theta: int | None = None,
) -> ConsistencyReport:
    """Compare the cone p-Laplacian of ``r^-beta eta`` with the spherical operator of eta.

    Both are nodal weak residuals divided by lumped masses; the cone side is scaled
    by ``r^((p-1)(beta+1)+1)``.
    """
    grid = cone_grid(cone, n_r, n_theta)
    eta = profile.evaluate(grid.theta)
    u = grid.lift(eta, beta)
    mesh = grid.mesh
    cone_res = p_laplacian_residual(mesh, params, u)
    cone_mass = np.asarray(mass_matrix(mesh).sum(axis=1)).ravel()
    strong_cone = cone_res / cone_mass * grid.node_r ** ((params.p - 1.0) * (beta + 1.0) + 1.0)

    section = (
        arc_mesh(cone.alpha, theta=grid.theta)
        if cone.is_planar
        else meridian_mesh(cone.alpha, cone.section.dim, theta=grid.theta)
    )
    sphere_res = eigen_residual(section, params, beta, eta)
    sphere_mass = np.asarray(mass_matrix(section).sum(axis=1)).ravel()
    strong_sphere = sphere_res / sphere_mass

    n_r_nodes, n_t = grid.shape
    interior_r = np.arange(1, n_r_nodes - 1)
    inner_t = np.flatnonzero(~section.boundary)
    rows = strong_cone.reshape(grid.shape)[np.ix_(interior_r, inner_t)]
    ref = strong_sphere[inner_t][None, :]
    scale = float(np.max(np.abs(strong_sphere[inner_t])))
    err = float(np.max(np.abs(rows - ref))) / max(scale, np.finfo(float).tiny)
    return ConsistencyReport(max_relative_error=err, n_nodes=int(rows.size))


def u_eps_family(
    section_cone: ConeDomain,
    params: PParams,
    omega: ColatGrid,
    beta: float,
    eps_values: Sequence[float],
    dlog: float = np.log(2.0) / 8.0,
) -> MonotoneReport:
    """Approximations on ``eps < r < 1`` with data ``eps^-beta omega``.

    Checks that they increase as eps decreases and that
    ``(u_omega - 1)_+ <= u_eps <= u_omega`` with ``u_omega = r^-beta omega``.
    ``eps_values`` must be decreasing powers-of-two multiples so grids nest.
    """
    omega = omega.scaled(1.0 / float(np.max(omega.values)))
    fields = []
    for eps in eps_values:
        cone = ConeDomain(section=section_cone.section, a=eps, b=1.0)
        grid = cone_grid_spaced(cone, dlog)
        fields.append(
            solve_truncated(cone, params, trace_from_profile(omega, grid.theta, eps, beta), grid=grid)
        )
    tol = 1e-5
    min_inc = np.inf
    low_viol = up_viol = 0.0
    for prev, nxt in zip(fields, fields[1:], strict=False):
        a = prev.as_array()
        b = nxt.as_array()[-a.shape[0] :]
        if not np.allclose(nxt.grid.r[-a.shape[0] :], prev.grid.r, rtol=1e-9):
            raise ValueError("eps values must nest on the radial grid")
        min_inc = min(min_inc, float(np.min(b - a)))
    for f in fields:
        sep = f.grid.lift(omega.evaluate(f.grid.theta), beta)
        top = float(np.max(sep))
        low_viol = max(low_viol, float(np.max(np.clip(sep - 1.0, 0.0, None) - f.values)) / top)
        up_viol = max(up_viol, float(np.max(f.values - sep)) / top)
    passed = min_inc >= -tol * float(np.max(fields[-1].values)) and low_viol <= 1e-2 and up_viol <= 1e-2
    return MonotoneReport(
        min_increment=min_inc,
        lower_bound_violation=low_viol,
        upper_bound_violation=up_viol,
        tolerance=tol,
        passed=bool(passed),
    )


def b_monotonicity(
    cone: ConeDomain,
    params: PParams,
    inner_data: InnerData,
    b_factors: Sequence[int] = (1, 2, 4),
    dlog: float = np.log(2.0) / 8.0,
) -> MonotoneReport:
    """Solutions for growing outer radii ``b * factor`` compared on the shared grid."""
    fields = []
    for factor in b_factors:
        big = ConeDomain(section=cone.section, a=cone.a, b=cone.b * factor)
        grid = cone_grid_spaced(big, dlog)
        fields.append(solve_truncated(big, params, inner_data, grid=grid))
    min_inc = np.inf
    for prev, nxt in zip(fields, fields[1:], strict=False):
        a = prev.as_array()
        b = nxt.as_array()[: a.shape[0]]
        min_inc = min(min_inc, float(np.min(b - a)))
    tol = 1e-5 * float(np.max(fields[0].values))
    return MonotoneReport(
        min_increment=min_inc,
        lower_bound_violation=0.0,
        upper_bound_violation=0.0,
        tolerance=tol,
        passed=bool(min_inc >= -tol),
    )
