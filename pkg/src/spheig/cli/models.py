from itertools import pairwise
from pathlib import Path
from typing import Literal, Self

import xxhash
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from spheig.geometry import PParams, SphericalDomain, load_domain
from spheig.models import Branch
from spheig.settings import settings

Command = Literal["exponent", "sweep", "cone", "verify"]


class RunConfig(BaseModel):
    """Validated parameters of one CLI invocation."""

    model_config = ConfigDict(frozen=True)

    command: Command
    p: float = Field(default=2.0, gt=1.0)
    dim: int = Field(default=2, ge=2)
    domain: Literal["arc", "cap", "polygon"] = "arc"
    alpha: float | None = Field(default=None, gt=0.0)
    vertices_file: Path | None = None
    branch: Branch = Branch.SINGULAR
    tol: float = Field(default=1e-10, gt=0.0)
    steps: tuple[float, ...] | None = None
    a: float = Field(default=1.0, gt=0.0)
    b: float = Field(default=256.0, gt=0.0)
    tau_grid: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    p_values: tuple[float, ...] = ()
    alpha_values: tuple[float, ...] = ()
    seed: int = 0
    only: tuple[str, ...] = ()
    trials: int = Field(default=10_000, ge=1)
    out: Path | None = None
    format: Literal["json", "csv", "text"] = "json"
    svg: Path | None = None

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.command in ("exponent", "cone") and self.alpha is None and self.vertices_file is None:
            raise ValueError("either --alpha or --vertices-file is required")
        steps = self.steps or ()
        if any(s <= 0.0 for s in steps) or any(x <= y for x, y in pairwise(steps)):
            raise ValueError("--steps must be positive and strictly decreasing")
        if self.a >= self.b:
            raise ValueError("--a must be smaller than --b")
        if any(p <= 1.0 for p in self.p_values) or any(a <= 0.0 for a in self.alpha_values):
            raise ValueError("sweep values need p > 1 and alpha > 0")
        if any(not 0.0 <= t <= 1.0 for t in self.tau_grid) or len(self.tau_grid) < 2:
            raise ValueError("--tau-grid needs at least two values in [0, 1]")
        return self

    @property
    def params(self) -> PParams:
        return PParams(p=self.p, dim=self.dim)

    def to_domain(self) -> SphericalDomain:
        if self.vertices_file is not None:
            return load_domain(self.vertices_file)
        match self.domain:
            case "arc":
                return SphericalDomain.arc(self.alpha)
            case "cap":
                return SphericalDomain.cap(self.alpha, self.dim)
            case "polygon":
                raise ValueError("polygons are read from --vertices-file")

    @computed_field
    @property
    def tolerances(self) -> dict[str, float]:
        return {"tol": self.tol, "ode_rtol": settings.ode_rtol, "ode_atol": settings.ode_atol}

    @property
    def run_id(self) -> str:
        """Fingerprint of the canonical config and the tolerances in effect."""
        canonical = self.model_dump_json(exclude={"out", "svg"})
        return xxhash.xxh32_hexdigest(canonical.encode())
