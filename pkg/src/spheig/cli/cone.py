from typing import Annotated

import numpy as np
import typer
from loguru import logger

from spheig.cone import (
    C_HAT_CANDIDATES,
    ConeDomain,
    ContractionReport,
    DecayFit,
    cone_grid,
    contraction_check,
    decay_fit,
    deformation_family,
    grid_step,
    nondegeneracy_check,
    sandwich_check,
    solve_truncated,
    tau_lipschitz_check,
    trace_from_profile,
)
from spheig.errors import ConfigError
from spheig.exponent import eigenfunction_pair, solve_member
from spheig.geometry import DomainSpec
from spheig.models import Branch
from spheig.verify import sandwich_inputs

from . import options as op
from .models import RunConfig
from .shared import dumps, emit, parse_values, report_errors, to_csv

app = typer.Typer()

SHELL_COLUMNS = (
    "j",
    "t",
    "M",
    "m",
    "osc",
    "beta_fit",
    "theta0",
    "delta1",
    "c_hat_est",
    "theta_fit",
    "tol",
    "ode_rtol",
    "ode_atol",
)


def check_ratio(cone: ConeDomain, c_hat: float = C_HAT_CANDIDATES[0]) -> None:
    """Two contraction shells ``a, c a`` must fit below ``sqrt(ab)``."""
    usable = float(np.sqrt(cone.b / cone.a))
    if usable < c_hat**2:
        raise ConfigError(
            f"b/a = {cone.b / cone.a:g} is too small; use b/a >= {c_hat**4:g} so that "
            f"sqrt(b/a) covers c_hat^2 = {c_hat**2:g}",
            ratio=cone.b / cone.a,
            c_hat=c_hat,
        )


def shell_rows(
    report: ContractionReport,
    fit: DecayFit,
    delta1: float,
    tolerances: dict[str, float],
) -> list[dict[str, float | int]]:
    """One row per shell; the run-level fit and contraction constants repeat on each."""
    run = {
        "beta_fit": fit.beta_fit,
        "theta0": fit.theta0,
        "delta1": delta1,
        "c_hat_est": report.c_hat_est,
        "theta_fit": report.theta_fit,
    } | tolerances
    return [
        {"j": j, "t": t, "M": big, "m": small, "osc": osc} | run
        for j, (t, big, small, osc) in enumerate(
            zip(report.shells, report.M, report.m, report.osc, strict=True)
        )
    ]


@app.command("cone")
@report_errors
def cone(
    p: op.POpt = 2.0,
    dim: op.DimOpt = 2,
    domain: op.DomainOpt = "arc",
    alpha: op.AlphaOpt = None,
    vertices_file: op.VerticesFileOpt = None,
    branch: op.BranchOpt = Branch.SINGULAR,
    tol: op.TolOpt = 1e-10,
    a: op.InnerRadiusOpt = 1.0,
    b: op.OuterRadiusOpt = 256.0,
    tau_grid: op.TauGridOpt = "0,0.25,0.5,0.75,1",
    delta: Annotated[
        float,
        typer.Option("--delta", help="Shrink/enlarge step of the eigenfunction pair."),
    ] = 0.1,
    out: op.OutOpt = None,
    fmt: op.FormatOpt = "json",
) -> None:
    """
    Solve the truncated cone problem, fit the decay and run the deformation diagnostics.
    """
    config = RunConfig(
        command="cone",
        p=p,
        dim=dim,
        domain=domain,
        alpha=alpha,
        vertices_file=vertices_file,
        branch=branch,
        tol=tol,
        a=a,
        b=b,
        tau_grid=parse_values(tau_grid),
        out=out,
        format=fmt,
    )
    section = config.to_domain()
    params = config.params
    cone_dom = ConeDomain(section=section, a=config.a, b=config.b)
    check_ratio(cone_dom)

    member = solve_member(section, params, config.branch, config.tol)
    grid = cone_grid(cone_dom)
    field_ = solve_truncated(
        cone_dom, params, trace_from_profile(member.omega, grid.theta, cone_dom.a, member.beta)
    )
    fit = decay_fit(field_)
    rel_err = abs(fit.beta_fit - member.beta) / abs(member.beta)
    logger.info("[cone] beta_fit={:.6g} shooting={:.6g} ({:.2%})", fit.beta_fit, member.beta, rel_err)

    pairing = eigenfunction_pair(section, params, config.branch, delta, config.tol)
    family = deformation_family(
        cone_dom, params, pairing.omega, pairing.omega_prime, config.tau_grid, member.beta
    )
    phi, psi = sandwich_inputs(family)
    sandwich = sandwich_check(family, phi, psi)
    lipschitz = tau_lipschitz_check(family)
    contraction = contraction_check(family)
    nondeg = nondegeneracy_check(field_, strict=False)
    for name, rep in (
        ("sandwich", sandwich),
        ("tau-lipschitz", lipschitz),
        ("contraction", contraction),
        ("nondegeneracy", nondeg),
    ):
        if not rep.passed:
            logger.warning("[cone] {} check failed", name)

    if config.format == "csv":
        rows = shell_rows(contraction, fit, family.delta1, config.tolerances)
        emit(to_csv(SHELL_COLUMNS, rows), config.out)
        return
    emit(
        dumps(
            {
                "run_id": config.run_id,
                "p": params.p,
                "N": params.dim,
                "domain": DomainSpec.from_domain(section).model_dump(mode="json", exclude_none=True),
                "branch": str(config.branch),
                "a": cone_dom.a,
                "b": cone_dom.b,
                "grid": {"n_r": grid.shape[0], "n_theta": grid.shape[1], "h": grid_step(grid)},
                "beta": member.beta,
                "decay_fit": fit.model_dump(),
                "decay_relative_error": rel_err,
                "delta1": family.delta1,
                "tau_grid": family.taus.tolist(),
                "sandwich": sandwich.model_dump(),
                "tau_lipschitz": lipschitz.model_dump(),
                "contraction": contraction.model_dump(),
                "nondegeneracy": nondeg.model_dump(),
                "tolerances": config.tolerances,
            }
        ),
        config.out,
    )
