from .assembly import (
    assemble_linearized,
    assemble_weighted,
    eigen_residual,
    element_weights,
    linearized_coefficients,
    mass_matrix,
    p_laplacian_residual,
    stiffness_matrix,
)
from .eigen import (
    PicardState,
    dirichlet_eigen,
    evaluate_residual,
    extrapolate_eps,
    frozen_eigen_mu,
    latitude_variation,
    principal_mu,
    solve_nonlinear,
)
from .io import MeshRecord, read_mesh, write_mesh
from .mesh import (
    DiscreteField,
    SurfaceMesh,
    arc_mesh,
    cap_mesh,
    field_from_grid,
    interpolate_profile,
    mesh_for,
    mesh_from_grid,
    meridian_mesh,
    polygon_mesh,
)

__all__ = [
    "DiscreteField",
    "MeshRecord",
    "PicardState",
    "SurfaceMesh",
    "arc_mesh",
    "assemble_linearized",
    "assemble_weighted",
    "cap_mesh",
    "dirichlet_eigen",
    "eigen_residual",
    "element_weights",
    "evaluate_residual",
    "extrapolate_eps",
    "field_from_grid",
    "frozen_eigen_mu",
    "interpolate_profile",
    "latitude_variation",
    "linearized_coefficients",
    "mass_matrix",
    "mesh_for",
    "mesh_from_grid",
    "meridian_mesh",
    "p_laplacian_residual",
    "polygon_mesh",
    "principal_mu",
    "read_mesh",
    "solve_nonlinear",
    "stiffness_matrix",
    "write_mesh",
]
