import sys

import typer
from loguru import logger

from spheig.cli import cone, exponent, sweep, verify
from spheig.cli.main import main_callback
from spheig.cli.shared import get_msg
from spheig.settings import CLI_LOG_PATH, settings

app = typer.Typer(
    help="spheig: separable p-harmonic exponents, cone diagnostics and a verification suite.",
    context_settings={
        "help_option_names": ["-h", "--help"],
        "max_content_width": 1000,
        "terminal_width": 1000,
    },
    add_completion=False,
    rich_markup_mode=None,
    pretty_exceptions_enable=False,
)

app.callback(invoke_without_command=True)(main_callback)

app.add_typer(exponent.app)
app.add_typer(sweep.app)
app.add_typer(cone.app)
app.add_typer(verify.app)


def run() -> None:
    try:
        app()
    except (typer.Exit, typer.Abort):
        pass
    except Exception as e:
        if settings.debug:
            raise
        logger.opt(exception=e).debug("Unhandled exception")
        print(f"Error: {get_msg(e)}", file=sys.stderr)
        print("\nFor more details, see the log file:", file=sys.stderr)
        print(f"  CLI: {CLI_LOG_PATH}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    run()
