"""Sub- and supersolutions built from two ordered eigenfunctions.

For ``omega >= omega_prime > 0`` with ``delta1 = min omega_prime / omega`` and
``delta1 < t < 1``::

    phi_t = max(omega_prime, t omega)
    psi_t = min((t / delta1) omega_prime, omega)

``phi_t`` is a subsolution and ``psi_t`` a supersolution of the spherical problem
when both inputs are eigenfunctions for the same exponent.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from attrs import field, frozen

from spheig.errors import PositivityError, RangeError
from spheig.fem_sphere import DiscreteField, SurfaceMesh, eigen_residual, field_from_grid, mass_matrix
from spheig.geometry import PParams
from spheig.ode_axisym import ColatGrid

from .models import CheckReport, SignKind

if TYPE_CHECKING:
    from spheig.cone import TauFamily

Profile = ColatGrid | DiscreteField


def as_field(profile: Profile) -> DiscreteField:
    return field_from_grid(profile) if isinstance(profile, ColatGrid) else profile


def min_ratio(omega: np.ndarray, omega_prime: np.ndarray, interior: np.ndarray) -> float:
    """``delta1``; both profiles must be positive and ordered on the interior."""
    a, b = omega[interior], omega_prime[interior]
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise PositivityError("profiles must be positive on interior nodes")
    if np.any(b > a * (1.0 + 1e-12)):
        raise ValueError("omega must dominate omega_prime on interior nodes")
    return float(np.min(b / a))


def sub_super_values(
    omega: np.ndarray, omega_prime: np.ndarray, t: float, delta1: float
) -> tuple[np.ndarray, np.ndarray]:
    phi = np.maximum(omega_prime, t * omega)
    psi = np.minimum((t / delta1) * omega_prime, omega)
    return phi, psi


def theta_of(t: float, delta1: float) -> float:
    return 1.0 if delta1 >= 1.0 else (t - delta1) / (1.0 - delta1)


@frozen
class SubSuperPair:
    t: float
    delta1: float
    phi: DiscreteField
    psi: DiscreteField
    phi_switch: np.ndarray = field(eq=False)
    psi_switch: np.ndarray = field(eq=False)

    @property
    def theta_t(self) -> float:
        return theta_of(self.t, self.delta1)

    def lift(self, r: np.ndarray, beta: float) -> tuple[np.ndarray, np.ndarray]:
        """Separable cone fields ``r^-beta phi_t`` and ``r^-beta psi_t`` on (radii, nodes)."""
        scale = np.asarray(r, dtype=float) ** (-beta)
        return np.outer(scale, self.phi.values), np.outer(scale, self.psi.values)


def build_sub_super(omega: Profile, omega_prime: Profile, t: float, *, closed: bool = False) -> SubSuperPair:
    """``phi_t`` and ``psi_t`` for ``t`` in ``(delta1, 1)``, or ``[delta1, 1]`` when ``closed``."""
    w, wp = as_field(omega), as_field(omega_prime)
    if w.mesh is not wp.mesh and w.values.shape != wp.values.shape:
        raise ValueError("profiles must live on the same grid or mesh")
    delta1 = min_ratio(w.values, wp.values, w.mesh.interior)
    inside = (delta1 <= t <= 1.0) if closed else (delta1 < t < 1.0)
    if not inside:
        raise RangeError(
            f"t={t} is outside the admissible range of delta1={delta1:.6g}",
            t=t,
            delta1=delta1,
        )
    phi, psi = sub_super_values(w.values, wp.values, t, delta1)
    return SubSuperPair(
        t=t,
        delta1=delta1,
        phi=w.with_values(phi),
        psi=w.with_values(psi),
        phi_switch=t * w.values > wp.values,
        psi_switch=(t / delta1) * wp.values < w.values,
    )


def sandwich_inputs(family: TauFamily) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Profiles ``phi`` and ``psi`` at ``t = (1 - delta1) tau + delta1`` for every tau of a family."""
    phis, psis = [], []
    for tau in family.taus:
        t = (1.0 - family.delta1) * tau + family.delta1
        phi, psi = sub_super_values(family.omega, family.omega_prime, t, family.delta1)
        phis.append(phi)
        psis.append(psi)
    return phis, psis


def convexity_slack(
    omega: np.ndarray, omega_prime: np.ndarray, phi: np.ndarray, psi: np.ndarray, theta: float
) -> float:
    """Smallest margin of ``phi <= theta omega + (1 - theta) omega_prime <= psi``, relative to max omega."""
    mix = theta * omega + (1.0 - theta) * omega_prime
    low = float(np.min(mix - phi))
    high = float(np.min(psi - mix))
    return min(low, high) / float(np.max(np.abs(omega)))


def convexity_bound_check(pair: SubSuperPair, omega: Profile, omega_prime: Profile) -> CheckReport:
    """``phi_t <= theta_t omega + (1 - theta_t) omega_prime <= psi_t`` at every node."""
    w, wp = as_field(omega).values, as_field(omega_prime).values
    slack = convexity_slack(w, wp, pair.phi.values, pair.psi.values, pair.theta_t)
    return CheckReport(
        name="convexity-bound",
        passed=slack >= -8.0 * np.finfo(float).eps,
        worst_slack=slack,
        statement="phi_t <= theta_t omega + (1-theta_t) omega' <= psi_t",
        details={"t": pair.t, "theta_t": pair.theta_t, "delta1": pair.delta1},
    )


def switch_band(mesh: SurfaceMesh, active: np.ndarray) -> np.ndarray:
    """Nodes of every cell on which ``active`` is not constant."""
    flags = active[mesh.cells]
    mixed = flags.any(axis=1) & ~flags.all(axis=1)
    band = np.zeros(mesh.n_vertices, dtype=bool)
    band[mesh.cells[mixed].ravel()] = True
    return band


def subsolution_sign_check(
    profile: Profile,
    params: PParams,
    beta: float,
    kind: SignKind,
    *,
    exclude: np.ndarray | None = None,
    rtol: float = 1e-3,
) -> CheckReport:
    """Sign of the weak residual against every interior hat function.

    ``sub`` requires all pairings ``<= tol``, ``super`` requires ``>= -tol``, where
    ``tol = rtol * |lambda| * max (M w)``. Nodes in ``exclude`` are left out of the
    assertion and their worst value is reported separately.
    """
    field_ = as_field(profile)
    mesh = field_.mesh
    if not field_.satisfies_dirichlet(atol=1e-12 * float(np.max(np.abs(field_.values)))):
        raise ValueError("profile must vanish on the boundary")
    res = eigen_residual(mesh, params, beta, field_.values)
    mass = mass_matrix(mesh) @ field_.values
    tol = rtol * max(abs(params.eigen_factor(beta)), 1.0) * float(np.max(np.abs(mass)))
    signed = res if kind == "sub" else -res
    asserted = mesh.interior.copy()
    band = np.zeros(mesh.n_vertices, dtype=bool) if exclude is None else exclude & mesh.interior
    asserted &= ~band
    worst_node = int(np.flatnonzero(asserted)[np.argmax(signed[asserted])])
    worst = float(signed[worst_node])
    excluded = float(np.max(signed[band])) if band.any() else 0.0
    return CheckReport(
        name=f"{kind}solution-sign",
        passed=worst <= tol,
        worst_slack=(tol - worst) / tol,
        statement=f"weak residual is {'<= 0' if kind == 'sub' else '>= 0'} against hat functions",
        details={
            "beta": beta,
            "tol": tol,
            "worst_node": worst_node,
            "excluded_nodes": int(band.sum()),
            "excluded_worst": excluded / tol,
        },
    )


def power_deformation(omega: ColatGrid, beta: float, exponent: float) -> tuple[ColatGrid, float]:
    """``eta = omega^theta`` with exponent ``theta * beta``."""
    values = np.clip(omega.values, 0.0, None)
    eta = ColatGrid(
        alpha=omega.alpha,
        nodes=omega.nodes,
        values=values**exponent,
        derivs=exponent * values ** (exponent - 1.0) * omega.derivs,
        dim=omega.dim,
    )
    return eta, exponent * beta


def power_deformation_operator(omega: ColatGrid, params: PParams, beta: float, exponent: float) -> np.ndarray:
    """Closed form of the spherical operator applied to ``omega^theta`` at interior nodes.

    With ``q = beta^2 omega^2 + |omega'|^2`` the value is
    ``-(p-1) theta^(p-1) omega^((theta-1)(p-1)-1) q^((p-2)/2)
    (beta (theta beta - beta) omega^2 + (theta - 1) |omega'|^2)``, which is
    nonpositive for ``beta > 0`` and ``theta >= 1``.
    """
    mask = omega.interior()
    w, dw = omega.values[mask], omega.derivs[mask]
    q = beta * beta * w * w + dw * dw
    p, th = params.p, exponent
    return (
        -(p - 1.0)
        * th ** (p - 1.0)
        * w ** ((th - 1.0) * (p - 1.0) - 1.0)
        * q ** ((p - 2.0) / 2.0)
        * (beta * (th * beta - beta) * w * w + (th - 1.0) * dw * dw)
    )


def spherical_operator_fd(profile: ColatGrid, params: PParams, beta: float) -> np.ndarray:
    """Spherical operator on an axisymmetric profile at interior nodes.

    The flux ``sin^(N-2) q^((p-2)/2) w'`` is formed from the stored derivative and
    differentiated with second-order differences, so the value is independent of
    any closed form. The pole node of a cap has no finite value and is NaN.
    """
    w, dw, theta = profile.values, profile.derivs, profile.nodes
    weight = np.sin(theta) ** (profile.dim - 2)
    safe = np.where(weight > 0.0, weight, np.nan)
    q = beta * beta * w * w + dw * dw
    flux = weight * q ** ((params.p - 2.0) / 2.0) * dw
    div = np.gradient(flux, theta, edge_order=2)
    mask = profile.interior()
    return -div[mask] / safe[mask] - params.eigen_factor(beta) * (
        q ** ((params.p - 2.0) / 2.0) * w
    )[mask]


def power_deformation_check(
    omega: ColatGrid,
    params: PParams,
    beta: float,
    exponent: float,
    *,
    rtol: float = 1e-3,
    floor: float = 0.1,
) -> CheckReport:
    """``omega^theta`` with exponent ``theta * beta`` is a subsolution.

    The closed form must agree with the finite-difference operator on nodes where
    ``omega >= floor * max omega`` and be nonpositive there.
    """
    eta, deformed_beta = power_deformation(omega, beta, exponent)
    closed = power_deformation_operator(omega, params, beta, exponent)
    numeric = spherical_operator_fd(eta, params, deformed_beta)
    w = omega.values[omega.interior()]
    keep = (w >= floor * float(np.max(omega.values))) & np.isfinite(numeric)
    scale = float(np.max(np.abs(closed[keep])))
    mismatch = float(np.max(np.abs(closed[keep] - numeric[keep]))) / scale
    sign_slack = -float(np.max(closed[keep])) / scale
    slack = min(sign_slack, (rtol - mismatch) / rtol)
    return CheckReport(
        name="power-deformation",
        passed=slack >= 0.0,
        worst_slack=slack,
        statement="omega^theta with beta*theta is a subsolution",
        details={"p": params.p, "theta": exponent, "mismatch": mismatch, "nodes": int(keep.sum())},
    )
