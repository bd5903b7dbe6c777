from __future__ import annotations

from enum import StrEnum
from typing import TYPE_CHECKING, Any

from attrs import field, frozen

if TYPE_CHECKING:
    from spheig.fem_sphere.mesh import DiscreteField
    from spheig.geometry.models import PParams, SphericalDomain
    from spheig.ode_axisym.models import ColatGrid


class Branch(StrEnum):
    SINGULAR = "singular"
    REGULAR = "regular"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.SINGULAR else -1


@frozen
class Eigenpair:
    """A separable exponent together with its positive spherical profile."""

    beta: float
    omega: ColatGrid | DiscreteField
    branch: Branch
    residual_norm: float
    iterations: int
    params: PParams
    domain: SphericalDomain
    extras: dict[str, Any] = field(factory=dict)

    def __attrs_post_init__(self) -> None:
        if self.branch.sign * self.beta <= 0:
            raise ValueError(
                f"beta={self.beta} has the wrong sign for the {self.branch} branch"
            )
