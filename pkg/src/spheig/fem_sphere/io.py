"""Mesh exchange as JSON text with deterministic node and cell order."""

from pathlib import Path

import numpy as np
from pydantic import BaseModel

from .mesh import SurfaceMesh


class MeshRecord(BaseModel):
    vertices: list[list[float]]
    cells: list[list[int]]
    boundary: list[bool]
    density: list[float]
    embedding: list[list[float]] | None = None
    on_sphere: bool = True

    @classmethod
    def from_mesh(cls, mesh: SurfaceMesh) -> "MeshRecord":
        return cls(
            vertices=mesh.vertices.tolist(),
            cells=mesh.cells.tolist(),
            boundary=mesh.boundary.tolist(),
            density=mesh.density.tolist(),
            embedding=None if mesh.embedding is None else mesh.embedding.tolist(),
            on_sphere=mesh.on_sphere,
        )

    def to_mesh(self) -> SurfaceMesh:
        return SurfaceMesh(
            vertices=np.asarray(self.vertices, dtype=float),
            cells=np.asarray(self.cells, dtype=np.int64),
            boundary=np.asarray(self.boundary, dtype=bool),
            density=np.asarray(self.density, dtype=float),
            embedding=None if self.embedding is None else np.asarray(self.embedding, dtype=float),
            on_sphere=self.on_sphere,
        )


def write_mesh(mesh: SurfaceMesh, path: Path) -> None:
    path.write_text(MeshRecord.from_mesh(mesh).model_dump_json(indent=1))


def read_mesh(path: Path) -> SurfaceMesh:
    return MeshRecord.model_validate_json(path.read_text()).to_mesh()
