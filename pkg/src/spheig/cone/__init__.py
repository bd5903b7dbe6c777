from .deformation import (
    C_HAT_CANDIDATES,
    TauFamily,
    contraction_check,
    deformation_family,
    grid_step,
    nondegeneracy_check,
    sandwich_check,
    tau_lipschitz_check,
)
from .domain import ConeDomain, ConeField, ConeGrid, cone_grid, cone_grid_spaced
from .models import (
    ConsistencyReport,
    ContractionReport,
    DecayFit,
    LipschitzReport,
    MonotoneReport,
    NondegeneracyReport,
    SandwichReport,
)
from .solve import (
    b_monotonicity,
    decay_fit,
    separable_consistency,
    solve_truncated,
    trace_from_profile,
    u_eps_family,
)

__all__ = [
    "C_HAT_CANDIDATES",
    "ConeDomain",
    "ConeField",
    "ConeGrid",
    "ConsistencyReport",
    "ContractionReport",
    "DecayFit",
    "LipschitzReport",
    "MonotoneReport",
    "NondegeneracyReport",
    "SandwichReport",
    "TauFamily",
    "b_monotonicity",
    "cone_grid",
    "cone_grid_spaced",
    "contraction_check",
    "decay_fit",
    "deformation_family",
    "grid_step",
    "nondegeneracy_check",
    "sandwich_check",
    "separable_consistency",
    "solve_truncated",
    "tau_lipschitz_check",
    "trace_from_profile",
    "u_eps_family",
]
