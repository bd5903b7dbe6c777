from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

Detail = float | int | str | bool | None
SignKind = Literal["sub", "super"]


class CheckReport(BaseModel):
    """Outcome of one property check.

    ``worst_slack`` is the smallest margin seen, normalized so that a negative
    value beyond the tolerance means the property failed.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    worst_slack: float
    statement: str
    details: dict[str, Detail] = Field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(self.details.items()))
        return f"{status} {self.name:<24} slack={self.worst_slack:+.3e} [{self.statement}] {extra}".rstrip()


def _fmt(value: Detail) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class SuiteReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    checks: list[CheckReport]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        head = f"# spheig verify seed={self.seed} checks={len(self.checks)}"
        tail = f"# {'all checks passed' if self.passed else 'FAILURES present'}"
        return [head, *(c.line() for c in self.checks), tail]
