"""Domain files.

A domain file is TOML with the keys ``kind``, ``alpha_radians`` (arcs, caps) or
``vertices`` (polygons, a list of 3-vectors), and ``dim``::

    kind = "cap"
    alpha_radians = 1.5707963267948966
    dim = 3
"""

import tomllib
from pathlib import Path
from typing import Self

from pydantic import BaseModel, ConfigDict, Field

from .models import DomainKind, SphericalDomain, Vec3


class DomainSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: DomainKind
    alpha_radians: float | None = None
    vertices: list[Vec3] | None = None
    dim: int | None = Field(default=None, ge=2)

    def to_domain(self) -> SphericalDomain:
        match self.kind:
            case DomainKind.ARC:
                return SphericalDomain(kind=self.kind, alpha=self.alpha_radians, dim=self.dim or 2)
            case DomainKind.CAP:
                return SphericalDomain(kind=self.kind, alpha=self.alpha_radians, dim=self.dim or 3)
            case DomainKind.POLYGON:
                return SphericalDomain(kind=self.kind, vertices=self.vertices, dim=self.dim or 3)

    @classmethod
    def from_domain(cls, domain: SphericalDomain) -> Self:
        return cls(
            kind=domain.kind,
            alpha_radians=domain.alpha,
            vertices=list(domain.vertices) if domain.vertices else None,
            dim=domain.dim,
        )

    def to_toml(self) -> str:
        lines = [f'kind = "{self.kind}"']
        if self.alpha_radians is not None:
            lines.append(f"alpha_radians = {self.alpha_radians!r}")
        if self.vertices is not None:
            rows = ",\n".join(f"  [{x!r}, {y!r}, {z!r}]" for x, y, z in self.vertices)
            lines.append(f"vertices = [\n{rows},\n]")
        if self.dim is not None:
            lines.append(f"dim = {self.dim}")
        return "\n".join(lines) + "\n"


def load_domain(path: Path) -> SphericalDomain:
    with path.open("rb") as f:
        data = tomllib.load(f)
    return DomainSpec.model_validate(data).to_domain()


def dump_domain(domain: SphericalDomain, path: Path) -> None:
    path.write_text(DomainSpec.from_domain(domain).to_toml())
