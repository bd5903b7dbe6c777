import csv
import io
import json
import re
import sys
from collections.abc import Callable, Iterable, Mapping, Sequence
from functools import wraps
from pathlib import Path
from typing import Any

import numpy as np
import typer
from loguru import logger
from pydantic import ValidationError

from spheig.errors import SpheigError


def clean_error_msg(msg: str) -> str:
    return re.sub(r"\[Errno \d+\] ", "", msg)


def get_msg(err: Exception | ExceptionGroup) -> str:
    match err:
        case ExceptionGroup():
            return "\n".join(get_msg(se) for se in err.exceptions)
        case ValidationError():
            msgs = []
            for e in err.errors():
                m = str(e["msg"])
                if m.startswith("Value error, "):
                    m = m[len("Value error, ") :]
                loc = ".".join(str(part) for part in e["loc"])
                msgs.append(f"{loc}: {m}" if loc else m)
            return "\n".join(msgs)
        case SpheigError():
            return err.message
        case ValueError():
            msg = str(err)
            if "could not convert string to float" in msg:
                return f"Invalid number in value list: {msg.split(': ')[-1]}"
            return msg
        case OSError() as e:
            if e.strerror and e.filename:
                return f"{e.strerror}: {e.filename}"
            return clean_error_msg(str(e))
        case _:
            return str(err)


def report_errors[**P, R](fn: Callable[P, R]) -> Callable[P, R]:
    """Turn solver errors into a JSON record on stderr and exit code 2."""

    @wraps(fn)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        try:
            return fn(*args, **kwargs)
        except SpheigError as e:
            logger.opt(exception=e).debug("Command failed")
            print(json.dumps(e.to_record(), sort_keys=True), file=sys.stderr)
            raise typer.Exit(2) from e

    return wrapper


def parse_values(text: str | None) -> tuple[float, ...]:
    """``"start:step:stop"`` (inclusive, empty when stop < start) or a comma list."""
    if text is None or not text.strip():
        return ()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"range must be start:step:stop, got {text!r}")
        start, step, stop = parts
        if step <= 0.0:
            raise ValueError(f"range step must be positive, got {step}")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 12) for k in range(max(n, 0)))
    return tuple(float(x) for x in text.split(",") if x.strip())


def dumps(data: Mapping[str, Any]) -> str:
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n"


def to_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else value


def emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info("Wrote {}", out)
