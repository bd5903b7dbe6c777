from .inequalities import (
    ellipticity_check,
    energy_constant,
    energy_identity_check,
    homogeneity_check,
    vector_inequality_check,
)
from .models import CheckReport, SuiteReport
from .subsuper import (
    SubSuperPair,
    build_sub_super,
    convexity_bound_check,
    convexity_slack,
    power_deformation,
    power_deformation_check,
    power_deformation_operator,
    sandwich_inputs,
    spherical_operator_fd,
    sub_super_values,
    subsolution_sign_check,
    switch_band,
)
from .suite import CHECKS, run_suite

__all__ = [
    "CHECKS",
    "CheckReport",
    "SubSuperPair",
    "SuiteReport",
    "build_sub_super",
    "convexity_bound_check",
    "convexity_slack",
    "ellipticity_check",
    "energy_constant",
    "energy_identity_check",
    "homogeneity_check",
    "power_deformation",
    "power_deformation_check",
    "power_deformation_operator",
    "run_suite",
    "sandwich_inputs",
    "spherical_operator_fd",
    "sub_super_values",
    "subsolution_sign_check",
    "switch_band",
    "vector_inequality_check",
]
