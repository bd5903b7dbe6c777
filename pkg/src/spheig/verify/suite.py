"""The seeded verification suite behind ``spheig verify``.

Each check draws from its own generator ``default_rng([seed, index])`` so that
selecting a subset with ``only`` does not change the numbers of the others.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable

import numpy as np
from loguru import logger

from spheig.fem_sphere import (
    DiscreteField,
    cap_mesh,
    evaluate_residual,
    interpolate_profile,
    meridian_mesh,
    mesh_for,
    solve_nonlinear,
)
from spheig.geometry import PParams, SphericalDomain
from spheig.models import Branch
from spheig.ode_axisym import solve_beta
from spheig.utils import map_concurrent

from .inequalities import ellipticity_check, energy_identity_check, homogeneity_check, vector_inequality_check
from .models import CheckReport, SuiteReport
from .subsuper import (
    build_sub_super,
    convexity_slack,
    power_deformation,
    power_deformation_check,
    sub_super_values,
    subsolution_sign_check,
    switch_band,
    theta_of,
)

DEFAULT_TRIALS = 10_000
CONVEXITY_TRIALS = 1_000
HALF_SPACE_P = (1.2, 1.5, 2.0, 2.5, 3.0, 4.0)
INEQUALITY_P = (1.1, 1.5, 1.9)


def _vector_inequality(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    return [
        vector_inequality_check(PParams(p=p, dim=n), trials, rng=rng)
        for p in INEQUALITY_P
        for n in (2, 3)
    ]


def _homogeneity(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    p = float(rng.uniform(1.2, 4.0))
    scale = float(10.0 ** rng.uniform(-1.0, 1.0))
    reports = []
    for pp, s in ((3.0, 2.0), (p, scale)):
        params = PParams(p=pp, dim=2)
        pair = solve_beta(params, SphericalDomain.arc(np.pi / 2.0), Branch.SINGULAR)
        reports.append(homogeneity_check(pair, s))
    return reports


def _energy(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    cases = [
        (PParams(p=2.0, dim=3), SphericalDomain.cap(np.pi / 2.0)),
        (PParams(p=2.0, dim=2), SphericalDomain.arc(np.pi / 2.0)),
        (PParams(p=2.5, dim=3), SphericalDomain.cap(np.pi / 2.0)),
        (PParams(p=1.5, dim=3), SphericalDomain.cap(2.0)),
    ]
    pairs = map_concurrent(lambda c: solve_beta(c[0], c[1], Branch.SINGULAR), cases)
    return [energy_identity_check(pair) for pair in pairs]


def _ellipticity(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    mesh = cap_mesh(1.0, 8)
    values = np.where(mesh.boundary, 0.0, rng.uniform(0.1, 1.0, mesh.n_vertices))
    field_ = DiscreteField(mesh, values)
    return [ellipticity_check(field_, PParams(p=p, dim=3), rng=rng) for p in (1.5, 2.5, 4.0)]


def _convexity(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    worst = np.inf
    for _ in range(CONVEXITY_TRIALS):
        n = int(rng.integers(5, 60))
        omega = rng.uniform(0.1, 10.0, n)
        ratio = rng.uniform(0.05, 1.0, n)
        ratio /= ratio.max()
        omega_prime = omega * ratio
        delta1 = float(ratio.min())
        t = float(rng.uniform(delta1, 1.0))
        phi, psi = sub_super_values(omega, omega_prime, t, delta1)
        worst = min(worst, convexity_slack(omega, omega_prime, phi, psi, theta_of(t, delta1)))
    return [
        CheckReport(
            name="convexity-bound",
            passed=worst >= -8.0 * np.finfo(float).eps,
            worst_slack=float(worst),
            statement="phi_t <= theta_t omega + (1-theta_t) omega' <= psi_t",
            details={"trials": CONVEXITY_TRIALS},
        )
    ]


def _sub_super(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    params = PParams(p=2.5, dim=3)
    domain = SphericalDomain.cap(np.pi / 2.0)
    shot = solve_beta(params, domain, Branch.SINGULAR)
    mesh = meridian_mesh(domain.alpha, domain.dim, 256)
    omega = interpolate_profile(shot.omega, mesh, domain)
    other = solve_nonlinear(mesh, params, domain, Branch.SINGULAR, initial=omega).omega
    # second solver's eigenfunction, scaled to touch omega from below
    omega_prime = other.scaled(1.0 / float(np.max(other.interior_values / omega.interior_values)))
    ratio = omega_prime.interior_values / omega.interior_values
    t = 0.5 * (1.0 + float(ratio.min()))
    pair = build_sub_super(omega, omega_prime, t, closed=True)
    return [
        subsolution_sign_check(
            pair.phi, params, shot.beta, "sub", exclude=switch_band(mesh, pair.phi_switch)
        ),
        subsolution_sign_check(
            pair.psi, params, shot.beta, "super", exclude=switch_band(mesh, pair.psi_switch)
        ),
    ]


def _power_deformation(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    reports = []
    for p in (2.0, 2.5):
        params = PParams(p=p, dim=2)
        pair = solve_beta(params, SphericalDomain.arc(np.pi / 2.0), Branch.SINGULAR)
        exponent = 1.2
        reports.append(power_deformation_check(pair.omega, params, pair.beta, exponent))
        eta, beta = power_deformation(pair.omega, pair.beta, exponent)
        reports.append(subsolution_sign_check(eta, params, beta, "sub"))
    return reports


def _sup_norm_trend(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    params = PParams(p=2.5, dim=3)
    domain = SphericalDomain.cap(np.pi / 2.0)
    ratios = []
    for level in (0, 1, 2):
        omega = solve_nonlinear(mesh_for(domain, level), params, domain, Branch.SINGULAR).omega
        ratios.append(float(np.max(omega.values)) / omega.lp_norm(params.p))
    spread = (max(ratios) - min(ratios)) / min(ratios)
    return [
        CheckReport(
            name="sup-norm-trend",
            passed=spread < 0.1,
            worst_slack=(0.1 - spread) / 0.1,
            statement="sup norm over Lp norm is stable under refinement",
            details={"spread": spread, "ratio_finest": ratios[-1]},
        )
    ]


def _nested(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    cases = []
    for dim, lo, hi in ((2, 0.5, 3.0), (3, 0.3, 2.5)):
        for _ in range(4):
            a1, a2 = np.sort(rng.uniform(lo, hi, 2))
            p = float(rng.uniform(1.3, 3.5))
            make = SphericalDomain.arc if dim == 2 else SphericalDomain.cap
            cases.append((PParams(p=p, dim=dim), make(float(a1)), make(float(a2))))

    def gap(case: tuple[PParams, SphericalDomain, SphericalDomain]) -> float:
        params, small, big = case
        b1 = solve_beta(params, small, Branch.SINGULAR).beta
        b2 = solve_beta(params, big, Branch.SINGULAR).beta
        return b1 - b2

    gaps = map_concurrent(gap, cases)
    worst = float(min(gaps))
    return [
        CheckReport(
            name="nested-monotonicity",
            passed=worst >= -1e-8,
            worst_slack=worst,
            statement="smaller domains have larger singular exponents",
            details={"pairs": len(cases)},
        )
    ]


def _half_space(rng: np.random.Generator, trials: int) -> list[CheckReport]:
    domain = SphericalDomain.cap(np.pi / 2.0)
    reports = []
    for p in HALF_SPACE_P:
        params = PParams(p=p, dim=3)
        beta = solve_beta(params, domain, Branch.REGULAR).beta
        residuals = []
        for n in (64, 128):
            mesh = meridian_mesh(domain.alpha, 3, n)
            residuals.append(evaluate_residual(mesh, params, -1.0, np.cos(mesh.vertices[:, 0])))
        err = abs(beta + 1.0)
        converging = residuals[1] <= residuals[0] / 2.0 or residuals[1] <= 1e-12
        reports.append(
            CheckReport(
                name="half-space",
                passed=err <= 1e-7 and converging,
                worst_slack=(1e-7 - err) / 1e-7,
                statement="x_N is p-harmonic: regular exponent -1",
                details={"p": p, "beta": beta, "residual": residuals[1]},
            )
        )
    return reports


CHECKS: dict[str, Callable[[np.random.Generator, int], list[CheckReport]]] = {
    "vector-inequality": _vector_inequality,
    "homogeneity": _homogeneity,
    "energy-identity": _energy,
    "ellipticity": _ellipticity,
    "convexity-bound": _convexity,
    "sub-super": _sub_super,
    "power-deformation": _power_deformation,
    "sup-norm-trend": _sup_norm_trend,
    "nested-monotonicity": _nested,
    "half-space": _half_space,
}


def run_suite(seed: int = 0, only: Iterable[str] | None = None, trials: int = DEFAULT_TRIALS) -> SuiteReport:
    selected = list(CHECKS) if not only else list(only)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; choose from {sorted(CHECKS)}")
    reports: list[CheckReport] = []
    for index, name in enumerate(CHECKS):
        if name not in selected:
            continue
        logger.info("[suite] running {}", name)
        reports.extend(CHECKS[name](np.random.default_rng([seed, index]), trials))
    return SuiteReport(seed=seed, checks=reports)
