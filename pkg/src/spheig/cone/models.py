from pydantic import BaseModel, ConfigDict


class DecayFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta_fit: float
    r_min: float
    r_max: float
    theta0: float
    kappa: float | None = None
    truncation_model: bool = False


class SandwichReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_violation: float
    truncation_violation: float
    tolerance: float
    worst_tau: float | None
    r_limit: float
    passed: bool


class LipschitzReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    min_slack_lower: float
    min_slack_upper: float
    bound_factor: float
    tolerance: float
    passed: bool


class ContractionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    shells: list[float]
    M: list[float]
    m: list[float]
    osc: list[float]
    c_hat_est: float
    c_hat_alt: float
    theta_fit: float
    bound: float
    boundary_case: bool
    passed: bool


class NondegeneracyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa: float
    band_min: float
    band_max: float
    ratio: float
    factor: float
    n_nodes: int
    passed: bool


class ConsistencyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_relative_error: float
    n_nodes: int


class MonotoneReport(BaseModel):
    """Nodewise ordering between solves on nested truncations."""

    model_config = ConfigDict(frozen=True)

    min_increment: float
    lower_bound_violation: float
    upper_bound_violation: float
    tolerance: float
    passed: bool
