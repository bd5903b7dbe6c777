import numpy as np
import typer
from loguru import logger

from spheig.errors import ComplementPolar, EmptyDomain, SelfIntersection
from spheig.exponent import (
    bracket_steps,
    exponent_bracket,
    maximality_probe,
    negative_gap_error,
    solve_member,
)
from spheig.fem_sphere import DiscreteField
from spheig.geometry import DomainSpec
from spheig.models import Branch, Eigenpair
from spheig.ode_axisym import ColatGrid

from . import options as op
from .models import RunConfig
from .shared import dumps, emit, parse_values, report_errors, to_csv

app = typer.Typer()

SAMPLES = 41
BRACKET_COLUMNS = (
    "k",
    "delta",
    "beta_inner",
    "beta_outer",
    "residual_inner",
    "residual_outer",
    "gap",
    "tol",
    "ode_rtol",
    "ode_atol",
)


def eigenfunction_samples(pair: Eigenpair) -> dict[str, list[float]]:
    match pair.omega:
        case ColatGrid() as grid:
            theta = np.linspace(0.0, grid.alpha, SAMPLES)
            return {"theta": theta.tolist(), "omega": grid.evaluate(theta).tolist()}
        case DiscreteField() as field_:
            idx = np.linspace(0, field_.mesh.n_vertices - 1, SAMPLES).round().astype(int)
            return {
                "points": field_.mesh.points[idx].tolist(),
                "omega": field_.values[idx].tolist(),
            }
    return {}


@app.command("exponent")
@report_errors
def exponent(
    p: op.POpt = 2.0,
    dim: op.DimOpt = 2,
    domain: op.DomainOpt = "arc",
    alpha: op.AlphaOpt = None,
    vertices_file: op.VerticesFileOpt = None,
    branch: op.BranchOpt = Branch.SINGULAR,
    tol: op.TolOpt = 1e-10,
    steps: op.StepsOpt = None,
    out: op.OutOpt = None,
    fmt: op.FormatOpt = "json",
) -> None:
    """
    Compute the exponent and profile on one domain, bracketed by inner and outer families.
    """
    config = RunConfig(
        command="exponent",
        p=p,
        dim=dim,
        domain=domain,
        alpha=alpha,
        vertices_file=vertices_file,
        branch=branch,
        tol=tol,
        steps=parse_values(steps) or None,
        out=out,
        format=fmt,
    )
    dom = config.to_domain()
    params = config.params
    pair = solve_member(dom, params, config.branch, config.tol)
    margins = config.steps or bracket_steps(dom)
    try:
        bracket = exponent_bracket(dom, params, config.branch, margins, config.tol)
    except (EmptyDomain, ComplementPolar, SelfIntersection) as e:
        if config.format == "csv":
            raise
        logger.warning("[exponent] bracket unavailable: {}", e.message)
        bracket, bracket_error = None, e.to_record()
    else:
        bracket_error = None
        logger.info("[exponent] {} p={}: beta={:.12g} gap={:.2e}", dom.label(), p, pair.beta, bracket.gap)

    if config.format == "csv":
        rows = [row | config.tolerances for row in bracket.rows()]
        emit(to_csv(BRACKET_COLUMNS, rows), config.out)
    else:
        maximal = (
            maximality_probe(bracket, params, dom)
            if bracket is not None and dom.is_axisymmetric
            else None
        )
        emit(
            dumps(
                {
                    "maximality": maximal.model_dump() | {"holds": maximal.holds} if maximal else None,
                    "run_id": config.run_id,
                    "p": params.p,
                    "N": params.dim,
                    "domain": DomainSpec.from_domain(dom).model_dump(mode="json", exclude_none=True),
                    "branch": str(config.branch),
                    "beta": pair.beta,
                    "beta_bracket": [bracket.beta_out_limit, bracket.beta_in_limit] if bracket else None,
                    "gap": bracket.gap if bracket else None,
                    "consistent": bracket.consistent if bracket else None,
                    "steps": list(margins),
                    "residual": pair.residual_norm,
                    "normalization": pair.omega.l1_norm(),
                    "eigenfunction": eigenfunction_samples(pair),
                    "bracket": bracket.rows() if bracket else None,
                    "bracket_error": bracket_error,
                    "tolerances": config.tolerances,
                }
            ),
            config.out,
        )
    if bracket is not None and not bracket.consistent:
        raise negative_gap_error(bracket, dom)
