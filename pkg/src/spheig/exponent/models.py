from pydantic import BaseModel, ConfigDict, Field

from spheig.models import Branch


class Extrapolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    limit: float
    error: float
    order: float | None = None
    fallback: bool = False


class BracketResult(BaseModel):
    """Exponents of the inner and outer families and their limits.

    A partial result (one family only) leaves the other side empty.
    """

    model_config = ConfigDict(frozen=True)

    branch: Branch
    steps: list[float]
    beta_inner: list[float] = Field(default_factory=list)
    beta_outer: list[float] = Field(default_factory=list)
    residual_inner: list[float] = Field(default_factory=list)
    residual_outer: list[float] = Field(default_factory=list)
    beta_in_limit: float | None = None
    beta_out_limit: float | None = None
    in_error: float = 0.0
    out_error: float = 0.0
    gap: float | None = None
    gap_allowed: float | None = None
    tol: float = 0.0
    consistent: bool = True

    def merge(self, other: "BracketResult") -> "BracketResult":
        return self.model_copy(
            update={
                "beta_outer": other.beta_outer or self.beta_outer,
                "residual_outer": other.residual_outer or self.residual_outer,
                "beta_out_limit": other.beta_out_limit
                if other.beta_out_limit is not None
                else self.beta_out_limit,
                "out_error": other.out_error or self.out_error,
            }
        )

    def rows(self) -> list[dict[str, float | int | None]]:
        """Per-step table: k, delta_k, exponents, residuals and running gap."""
        out = []
        for k, delta in enumerate(self.steps):
            b_in = self.beta_inner[k] if k < len(self.beta_inner) else None
            b_out = self.beta_outer[k] if k < len(self.beta_outer) else None
            out.append(
                {
                    "k": k,
                    "delta": delta,
                    "beta_inner": b_in,
                    "beta_outer": b_out,
                    "residual_inner": self.residual_inner[k] if b_in is not None else None,
                    "residual_outer": self.residual_outer[k] if b_out is not None else None,
                    "gap": abs(b_in) - abs(b_out) if b_in is not None and b_out is not None else None,
                }
            )
        return out


class QuotientDiagnostic(BaseModel):
    model_config = ConfigDict(frozen=True)

    osc_log_ratio: float = Field(ge=0.0)
    holder_constant: float = Field(ge=0.0)
    holder_exponent: float
    comparability_constant: float = Field(ge=1.0)
    n_points: int
    n_pairs: int


class MaximalityProbe(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta_plus: float
    first_zero_plus: float
    beta_minus: float
    first_zero_minus: float
    alpha: float

    @property
    def holds(self) -> bool:
        return self.first_zero_plus < self.alpha < self.first_zero_minus
