"""Deformation between the cones of two ordered profiles and its diagnostics.

For ``omega >= omega_prime > 0`` the family ``v_tau`` solves the truncated problem
with inner data ``a^-beta (tau omega + (1 - tau) omega_prime)``. The quotient
``q = (d v / d tau) / v`` is taken by finite differences in tau; its oscillation
over the cone beyond radius t contracts geometrically when the two profiles belong
to the same exponent.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from attrs import evolve, field, frozen
from loguru import logger

from spheig.errors import ContractionFailure, MonotonicityViolation, NondegeneracyFailure, PositivityError
from spheig.geometry import PParams
from spheig.ode_axisym import ColatGrid
from spheig.utils import map_concurrent

from .domain import ConeDomain, ConeField, ConeGrid, cone_grid
from .models import ContractionReport, LipschitzReport, NondegeneracyReport, SandwichReport
from .solve import solve_truncated

C_HAT_CANDIDATES = (2.0, 2.5, 3.0, 4.0, 6.0, 8.0)
MONOTONE_RTOL = 1e-6


def _profile_on(profile: ColatGrid | np.ndarray, grid: ConeGrid) -> np.ndarray:
    if isinstance(profile, ColatGrid):
        return np.asarray(profile.evaluate(grid.theta), dtype=float)
    values = np.asarray(profile, dtype=float)
    if values.shape != grid.theta.shape:
        raise ValueError("profiles must be sampled at the section angles of the grid")
    return values


def _section_interior(grid: ConeGrid) -> np.ndarray:
    mask = np.ones(len(grid.theta), dtype=bool)
    mask[-1] = False
    if grid.cone.is_planar:
        mask[0] = False
    return mask


@frozen
class TauFamily:
    cone: ConeDomain
    taus: np.ndarray = field(eq=False)
    fields: tuple[ConeField, ...] = field(eq=False)
    omega: np.ndarray = field(eq=False)
    omega_prime: np.ndarray = field(eq=False)
    delta1: float
    beta: float
    shells: np.ndarray = field(eq=False)
    M: np.ndarray = field(eq=False)
    m: np.ndarray = field(eq=False)

    @property
    def grid(self) -> ConeGrid:
        return self.fields[0].grid

    @property
    def r_limit(self) -> float:
        """Radius beyond which the outer truncation layer is not trusted."""
        return float(np.sqrt(self.cone.a * self.cone.b))

    @property
    def reference_index(self) -> int:
        """The tau interval whose quotient feeds the shell diagnostics."""
        mids = 0.5 * (self.taus[1:] + self.taus[:-1])
        return int(np.argmin(np.abs(mids - 0.5)))

    def quotient(self, k: int | None = None) -> np.ndarray:
        """Nodal ``(v_{k+1} - v_k) / (dtau v_mid)``; NaN at Dirichlet nodes and where v vanishes."""
        k = self.reference_index if k is None else k
        lo, hi = self.fields[k].values, self.fields[k + 1].values
        mid = 0.5 * (lo + hi)
        q = np.full_like(mid, np.nan)
        usable = ~self.grid.dirichlet(True) & (mid > 0.0)
        q[usable] = (hi[usable] - lo[usable]) / ((self.taus[k + 1] - self.taus[k]) * mid[usable])
        return q

    def shell_extrema(self, shells: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """``M(t)`` and ``m(t)`` of the quotient over ``t <= r <= r_limit``."""
        q = self.quotient()
        r = self.grid.node_r
        big, small = [], []
        for t in shells:
            sel = (r >= t * (1.0 - 1e-12)) & (r <= self.r_limit * (1.0 + 1e-12)) & np.isfinite(q)
            if not sel.any():
                big.append(np.nan)
                small.append(np.nan)
                continue
            big.append(float(np.max(q[sel])))
            small.append(float(np.min(q[sel])))
        return np.asarray(big), np.asarray(small)


def _shells(a: float, limit: float, ratio: float) -> np.ndarray:
    n = int(np.floor(np.log(limit / a) / np.log(ratio) + 1e-9))
    return a * ratio ** np.arange(max(n, 0))


def deformation_family(
    cone: ConeDomain,
    params: PParams,
    omega: ColatGrid | np.ndarray,
    omega_prime: ColatGrid | np.ndarray,
    tau_grid: Sequence[float],
    beta: float,
    *,
    n_r: int | None = None,
    n_theta: int | None = None,
) -> TauFamily:
    """Solve the deformation problem on every tau and check that the family grows in tau."""
    taus = np.asarray(sorted(tau_grid), dtype=float)
    if len(taus) < 2 or taus[0] < 0.0 or taus[-1] > 1.0:
        raise ValueError("tau grid needs at least two values in [0, 1]")
    grid = cone_grid(cone, n_r, n_theta)
    w = _profile_on(omega, grid)
    w_prime = _profile_on(omega_prime, grid)
    inner = _section_interior(grid)
    if np.any(w[inner] <= 0.0) or np.any(w_prime[inner] <= 0.0):
        raise PositivityError("profiles must be positive inside the section")
    if np.any(w_prime[inner] > w[inner] * (1.0 + 1e-12)):
        raise ValueError("omega must dominate omega_prime")
    delta1 = float(np.min(w_prime[inner] / w[inner]))

    def solve(tau: float) -> ConeField:
        data = cone.a ** (-beta) * (tau * w + (1.0 - tau) * w_prime)
        return solve_truncated(cone, params, data, grid=grid)

    fields = tuple(map_concurrent(solve, list(taus)))
    scale = max(float(np.max(f.values)) for f in fields)
    for k, (lo, hi) in enumerate(zip(fields, fields[1:], strict=False)):
        drop = lo.values - hi.values
        worst = int(np.argmax(drop))
        if drop[worst] > MONOTONE_RTOL * scale:
            raise MonotonicityViolation(
                "deformation family decreases in tau",
                tau=float(taus[k]),
                node=worst,
                drop=float(drop[worst]),
            )
    logger.debug("[cone] deformation family with {} tau values, delta1={:.4f}", len(taus), delta1)

    family = TauFamily(
        cone=cone,
        taus=taus,
        fields=fields,
        omega=w,
        omega_prime=w_prime,
        delta1=delta1,
        beta=beta,
        shells=np.empty(0),
        M=np.empty(0),
        m=np.empty(0),
    )
    shells = _shells(cone.a, family.r_limit, 2.0)
    big, small = family.shell_extrema(shells)
    return evolve(family, shells=shells, M=big, m=small)


def grid_step(grid: ConeGrid) -> float:
    """Mesh size in the scale-free coordinates ``(ln r, theta)``."""
    return float(max(np.max(np.diff(np.log(grid.r))), np.max(np.diff(grid.theta))))


def sandwich_check(
    family: TauFamily,
    phi: Sequence[np.ndarray],
    psi: Sequence[np.ndarray],
    u_omega: np.ndarray | None = None,
    u_omega_prime: np.ndarray | None = None,
) -> SandwichReport:
    """Five-way ordering ``u_omega' <= v_phi <= v_tau <= v_psi <= u_omega`` at every node.

    ``phi[i]`` and ``psi[i]`` are the sub and super profiles at the section angles
    for ``family.taus[i]``. Violations are measured after multiplying by ``r^beta``
    and dividing by ``max omega``; only nodes with ``r <= sqrt(ab)`` decide the
    outcome, the rest is reported as truncation violation.
    """
    grid = family.grid
    if len(phi) != len(family.taus) or len(psi) != len(family.taus):
        raise ValueError("one sub and one super profile per tau is required")

    def lift(profile: np.ndarray) -> np.ndarray:
        return grid.lift(np.asarray(profile, dtype=float), family.beta)

    upper = lift(family.omega) if u_omega is None else u_omega
    lower = lift(family.omega_prime) if u_omega_prime is None else u_omega_prime
    weight = grid.node_r**family.beta / float(np.max(family.omega))
    inside = grid.node_r <= family.r_limit * (1.0 + 1e-12)

    worst, worst_tau, outer = 0.0, None, 0.0
    for tau, field_, sub, sup in zip(family.taus, family.fields, phi, psi, strict=True):
        chain = [lower, lift(sub), field_.values, lift(sup), upper]
        viol = np.zeros(grid.mesh.n_vertices)
        for lo, hi in zip(chain, chain[1:], strict=False):
            viol = np.maximum(viol, (lo - hi) * weight)
        inner_max = float(np.max(viol[inside]))
        if inner_max > worst:
            worst, worst_tau = inner_max, float(tau)
        if (~inside).any():
            outer = max(outer, float(np.max(viol[~inside])))
    tol = 10.0 * grid_step(grid) ** 2
    if outer > tol:
        logger.warning("[cone] truncation layer violates the sandwich by {:.3e}", outer)
    return SandwichReport(
        max_violation=worst,
        truncation_violation=outer,
        tolerance=tol,
        worst_tau=worst_tau,
        r_limit=family.r_limit,
        passed=worst <= tol,
    )


def tau_lipschitz_check(family: TauFamily) -> LipschitzReport:
    """``0 <= (v_tau' - v_tau) / (tau' - tau) <= (1/delta1 - 1) v_tau'`` for consecutive taus."""
    factor = 1.0 / family.delta1 - 1.0
    scale = max(float(np.max(f.values)) for f in family.fields)
    lower_slack, upper_slack = np.inf, np.inf
    for k in range(len(family.taus) - 1):
        lo, hi = family.fields[k].values, family.fields[k + 1].values
        slope = (hi - lo) / (family.taus[k + 1] - family.taus[k])
        lower_slack = min(lower_slack, float(np.min(slope)) / scale)
        upper_slack = min(upper_slack, float(np.min(factor * hi - slope)) / scale)
    tol = 1e-5
    return LipschitzReport(
        min_slack_lower=lower_slack,
        min_slack_upper=upper_slack,
        bound_factor=factor,
        tolerance=tol,
        passed=lower_slack >= -tol and upper_slack >= -tol,
    )


def _harnack_holds(family: TauFamily, q: np.ndarray, c: float, sigma0: float) -> bool:
    grid = family.grid
    r = grid.node_r
    j0 = int(np.argmin(np.abs(grid.theta - sigma0)))
    shells = _shells(family.cone.a, family.r_limit / c, c)
    if len(shells) == 0:
        return False
    for t in shells:
        i0 = int(np.argmin(np.abs(grid.r - c * t)))
        ref = q[i0 * len(grid.theta) + j0]
        if not np.isfinite(ref) or ref <= 0.0:
            return False
        sel = (r >= t * (1.0 - 1e-12)) & (r <= c * t * (1.0 + 1e-12)) & np.isfinite(q)
        ratio = q[sel] / ref
        if np.any(ratio < 1.0 / c) or np.any(ratio > c):
            return False
    return True


def _estimate_c_hat(family: TauFamily, q: np.ndarray, sigma0: float) -> float:
    for c in C_HAT_CANDIDATES:
        if _harnack_holds(family, q, c, sigma0):
            return c
    logger.warning("[cone] Harnack comparison fails for every candidate ratio")
    return C_HAT_CANDIDATES[-1]


def contraction_check(family: TauFamily, tol: float = 1e-2) -> ContractionReport:
    """Shell oscillation ``M(t) - m(t)`` on ``t_j = c^j a`` and its geometric rate.

    ``c`` is the smallest candidate ratio for which ``q(x) / q(c t, sigma0)`` stays in
    ``[1/c, c]`` on every shell, with sigma0 the section center; the estimate for a
    shifted sigma0 is reported alongside.
    """
    q = family.quotient()
    finite = q[np.isfinite(q)]
    if finite.size == 0:
        raise ContractionFailure("quotient is undefined everywhere")
    scale = max(float(np.max(np.abs(finite))), 1.0)
    trivial = float(np.max(finite) - np.min(finite)) <= 1e-12 * scale

    cone = family.cone
    sigma0 = cone.alpha / 2.0 if cone.is_planar else 0.0
    if trivial:
        c_hat = c_alt = C_HAT_CANDIDATES[0]
    else:
        c_hat = _estimate_c_hat(family, q, sigma0)
        c_alt = _estimate_c_hat(family, q, cone.alpha / 4.0)

    shells = _shells(cone.a, family.r_limit, c_hat)
    if len(shells) < 2:
        raise ContractionFailure(
            "fewer than two contraction shells fit inside the truncated cone",
            c_hat=c_hat,
            ratio=cone.b / cone.a,
        )
    big, small = family.shell_extrema(shells)
    osc = np.clip(big - small, 0.0, None)
    rises = np.diff(osc)
    if np.any(rises > tol * max(float(osc[0]), 1e-300)):
        raise ContractionFailure(
            "shell oscillation is not non-increasing",
            osc=osc.tolist(),
            shell=int(np.argmax(rises)) + 1,
        )

    if trivial or np.any(osc <= 1e-12 * scale):
        theta_fit = 0.0
    else:
        slope = np.polyfit(np.arange(len(osc)), np.log(osc), 1)[0]
        theta_fit = float(np.exp(slope))
    bound = (c_hat**2 - 1.0) / (c_hat**2 + 1.0)
    return ContractionReport(
        shells=shells.tolist(),
        M=big.tolist(),
        m=small.tolist(),
        osc=osc.tolist(),
        c_hat_est=c_hat,
        c_hat_alt=c_alt,
        theta_fit=theta_fit,
        bound=bound,
        boundary_case=theta_fit >= 0.95,
        passed=theta_fit <= bound + tol,
    )


def nondegeneracy_check(
    field_: ConeField,
    kappa: float = 0.5,
    factor: float = 50.0,
    *,
    strict: bool = True,
) -> NondegeneracyReport:
    """Band ``|grad u| dist / u`` near the lateral boundary on ``2a <= r <= b/4``."""
    grid = field_.grid
    r = grid.node_r
    dist = grid.lateral_distance()
    u = field_.values
    cone = field_.cone
    sel = (
        (r >= 2.0 * cone.a)
        & (r <= cone.b / 4.0)
        & (dist <= kappa * r)
        & ~grid.dirichlet(field_.outer_zero)
        & (u > 0.0)
    )
    if not sel.any():
        raise NondegeneracyFailure("no nodes in the boundary strip", kappa=kappa)
    grad = np.linalg.norm(field_.nodal_gradients(), axis=1)
    band = grad[sel] * dist[sel] / u[sel]
    lo, hi = float(np.min(band)), float(np.max(band))
    ratio = hi / lo if lo > 0.0 else np.inf
    passed = bool(np.isfinite(ratio) and ratio <= factor)
    if strict and not passed:
        raise NondegeneracyFailure(
            "boundary band is not comparable to a constant",
            band_min=lo,
            band_max=hi,
            factor=factor,
        )
    return NondegeneracyReport(
        kappa=kappa,
        band_min=lo,
        band_max=hi,
        ratio=float(ratio),
        factor=factor,
        n_nodes=int(sel.sum()),
        passed=passed,
    )
