from typing import Annotated

import typer
from loguru import logger

from spheig.settings import CLI_LOG_PATH, settings
from spheig.utils.debug import setup_debug

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"


def main_callback(
    ctx: typer.Context,
    debug: Annotated[
        bool,
        typer.Option("--debug", "-d", help="Log every solver step to stderr."),
    ] = False,
    threads: Annotated[
        int | None,
        typer.Option(
            "--threads",
            min=1,
            help="Worker threads for family, tau and sweep solves (env: SPHEIG_THREADS).",
        ),
    ] = None,
) -> None:
    logger.enable("spheig")
    setup_debug(debug)
    if threads is not None:
        settings.threads = threads

    CLI_LOG_PATH.parent.mkdir(parents=True, exist_ok=True)
    logger.add(CLI_LOG_PATH, rotation="10 MB", retention="1 day", level="DEBUG", format=LOG_FORMAT, enqueue=True)
    logger.debug("Settings: {}", settings.model_dump())

    ctx.ensure_object(dict)
    if ctx.invoked_subcommand is None:
        print(ctx.get_help())
        raise typer.Exit
