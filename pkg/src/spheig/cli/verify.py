from typing import Annotated, Literal

import typer

from spheig.verify import CHECKS, run_suite

from . import options as op
from .models import RunConfig
from .shared import dumps, emit, report_errors

app = typer.Typer()


@app.command("verify")
@report_errors
def verify(
    seed: op.SeedOpt = 0,
    only: Annotated[
        list[str] | None,
        typer.Option("--only", help=f"Run only these checks (repeatable): {', '.join(CHECKS)}."),
    ] = None,
    trials: Annotated[
        int,
        typer.Option("--trials", min=1, help="Random trials per (p, N) of the vector inequality."),
    ] = 10_000,
    out: op.OutOpt = None,
    fmt: Annotated[
        Literal["text", "json"],
        typer.Option("--format", "-f", help="Report as PASS/FAIL lines or JSON."),
    ] = "text",
) -> None:
    """
    Run the seeded property suite; exits with 1 when any check fails.
    """
    config = RunConfig(
        command="verify",
        seed=seed,
        only=tuple(only or ()),
        trials=trials,
        out=out,
        format=fmt,
    )
    report = run_suite(config.seed, config.only, config.trials)
    if config.format == "json":
        emit(dumps({"run_id": config.run_id, **report.model_dump(), "passed": report.passed}), config.out)
    else:
        emit("\n".join(report.lines()) + "\n", config.out)
    if not report.passed:
        raise typer.Exit(1)
