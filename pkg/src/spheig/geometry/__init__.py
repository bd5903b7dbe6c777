from .io import DomainSpec, dump_domain, load_domain
from .models import (
    DomainFamily,
    DomainKind,
    FamilyDirection,
    GnomonicChart,
    PParams,
    SphericalDomain,
    gnomonic_chart,
)
from .ops import (
    boundary_distance,
    boundary_distances,
    contains,
    expand,
    expansion_room,
    incenter,
    inradius,
    interior_angles,
    segment_distance,
    shrink,
)

__all__ = [
    "DomainFamily",
    "DomainKind",
    "DomainSpec",
    "FamilyDirection",
    "GnomonicChart",
    "PParams",
    "SphericalDomain",
    "boundary_distance",
    "boundary_distances",
    "contains",
    "dump_domain",
    "expand",
    "expansion_room",
    "gnomonic_chart",
    "incenter",
    "inradius",
    "interior_angles",
    "load_domain",
    "segment_distance",
    "shrink",
]
