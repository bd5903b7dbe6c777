from .models import ColatGrid, ShootResult, colatitude_density, sphere_area
from .shoot import POLE_START, ode_rhs, pole_series, shoot
from .solve import first_zero, solve_beta

__all__ = [
    "POLE_START",
    "ColatGrid",
    "ShootResult",
    "colatitude_density",
    "first_zero",
    "ode_rhs",
    "pole_series",
    "shoot",
    "solve_beta",
    "sphere_area",
]
