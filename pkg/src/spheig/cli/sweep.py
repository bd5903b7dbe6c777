import time
from collections.abc import Sequence
from itertools import pairwise, product
from pathlib import Path
from typing import Annotated, Any

import matplotlib as mpl
import typer
from loguru import logger

from spheig.errors import SpheigError
from spheig.exponent import solve_member
from spheig.geometry import PParams, SphericalDomain
from spheig.models import Branch
from spheig.utils import map_concurrent

from . import options as op
from .models import RunConfig
from .shared import emit, get_msg, parse_values, report_errors, to_csv

mpl.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

app = typer.Typer()

COLUMNS = (
    "p",
    "alpha",
    "dim",
    "branch",
    "beta",
    "residual",
    "iterations",
    "wall_ms",
    "tol",
    "ode_rtol",
    "ode_atol",
    "error",
)


def _domain(kind: str, alpha: float, dim: int) -> SphericalDomain:
    if kind == "arc":
        return SphericalDomain.arc(alpha)
    return SphericalDomain.cap(alpha, dim)


def sweep_row(config: RunConfig, p: float, alpha: float, *, timing: bool = True) -> dict[str, Any]:
    """One row; solver failures land in the ``error`` column."""
    row: dict[str, Any] = {
        "p": p,
        "alpha": alpha,
        "dim": config.dim,
        "branch": str(config.branch),
        **config.tolerances,
    }
    params = PParams(p=p, dim=config.dim)
    start = time.perf_counter()
    try:
        pair = solve_member(_domain(config.domain, alpha, config.dim), params, config.branch, config.tol)
    except (SpheigError, ValueError) as e:
        logger.warning("[sweep] p={} alpha={}: {}", p, alpha, get_msg(e))
        row["error"] = type(e).__name__
        return row
    finally:
        if timing:
            row["wall_ms"] = round(1e3 * (time.perf_counter() - start), 3)
    row |= {"beta": pair.beta, "residual": pair.residual_norm, "iterations": pair.iterations}
    return row


def run_sweep(config: RunConfig, *, timing: bool = True) -> list[dict[str, Any]]:
    grid = sorted(product(config.p_values, config.alpha_values), key=lambda pa: (pa[1], pa[0]))
    return map_concurrent(lambda pa: sweep_row(config, *pa, timing=timing), grid)


def p_trend(rows: Sequence[dict[str, Any]]) -> dict[float, str]:
    """Direction of beta in p for each alpha: increasing, decreasing or mixed."""
    trend = {}
    for alpha in sorted({r["alpha"] for r in rows}):
        betas = [r["beta"] for r in sorted(rows, key=lambda r: r["p"]) if r["alpha"] == alpha and r.get("beta") is not None]
        steps = [y - x for x, y in pairwise(betas)]
        if steps and all(s >= 0 for s in steps):
            trend[alpha] = "increasing"
        elif steps and all(s <= 0 for s in steps):
            trend[alpha] = "decreasing"
        else:
            trend[alpha] = "mixed"
    return trend


def write_svg(rows: Sequence[dict[str, Any]], path: Path) -> None:
    """Beta against p, one line per alpha."""
    with mpl.rc_context({"svg.hashsalt": "spheig", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for alpha in sorted({r["alpha"] for r in rows}):
            pts = [(r["p"], r["beta"]) for r in rows if r["alpha"] == alpha and r.get("beta") is not None]
            if pts:
                ps, betas = zip(*sorted(pts), strict=True)
                ax.plot(ps, betas, marker="o", label=f"alpha={alpha:.4g}")
        ax.set_xlabel("p")
        ax.set_ylabel("beta")
        if ax.lines:
            ax.legend()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info("Wrote {}", path)


@app.command("sweep")
@report_errors
def sweep(
    p: Annotated[str, typer.Option("--p", help="p values: start:step:stop or a comma list.")] = "2",
    alpha: Annotated[
        str | None,
        typer.Option("--alpha", help="alpha values in radians: start:step:stop or a comma list."),
    ] = None,
    dim: op.DimOpt = 2,
    domain: op.DomainOpt = "arc",
    branch: op.BranchOpt = Branch.SINGULAR,
    tol: op.TolOpt = 1e-10,
    timing: Annotated[
        bool,
        typer.Option("--timing/--no-timing", help="Record wall_ms (the only nondeterministic column)."),
    ] = True,
    out: op.OutOpt = None,
    svg: op.SvgOpt = None,
) -> None:
    """
    Tabulate exponents over a grid of p and alpha values (CSV).
    """
    if alpha is None:
        raise ValueError("--alpha is required")
    if domain == "polygon":
        raise ValueError("sweeps run over arcs or caps")
    if domain == "arc" and dim != 2:
        raise ValueError("arcs live in dimension N = 2")
    config = RunConfig(
        command="sweep",
        p=2.0,
        dim=dim,
        domain=domain,
        branch=branch,
        tol=tol,
        p_values=parse_values(p),
        alpha_values=parse_values(alpha),
        out=out,
        format="csv",
        svg=svg,
    )
    rows = run_sweep(config, timing=timing)
    failed = sum(1 for r in rows if r.get("error"))
    logger.info("[sweep] {} rows, {} failed", len(rows), failed)
    for a, direction in p_trend(rows).items():
        logger.info("[sweep] alpha={:.6g}: beta {} in p", a, direction)
    emit(to_csv(COLUMNS, rows), config.out)
    if config.svg is not None:
        write_svg(rows, config.svg)
