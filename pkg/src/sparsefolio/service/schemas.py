"""Request/response models for the solve and sweep endpoints."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class SyntheticSpec(BaseModel):
    n: int = Field(ge=1)
    periods: int = Field(ge=2)
    seed: int
    sectors: int = Field(ge=1)


class DatasetSpec(BaseModel):
    """Exactly one of `synthetic` or `prices_csv` must be given."""

    synthetic: SyntheticSpec | None = None
    prices_csv: str | None = None
    # Client-side name (e.g. the CSV path) used in error messages.
    name: str | None = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.synthetic is None) == (self.prices_csv is None):
            raise ValueError("give exactly one of synthetic or prices_csv")
        return self


class SolverOptions(BaseModel):
    rho: float = Field(default=5.0, gt=4.0)
    sigma: float | None = Field(default=None, gt=0.0)
    epsilon: float = Field(default=1e-7, gt=0.0)
    max_iter: int = Field(default=10000, ge=1)
    projection: Literal["paper", "euclidean"] = "paper"


class SolveRequest(BaseModel):
    dataset: DatasetSpec
    beta1: float = Field(gt=0.0)
    beta2: float = Field(default=1.0, gt=0.0)
    r_min: float = Field(default=0.1, ge=0.0)
    solver: SolverOptions = SolverOptions()
    method: Literal["sepo", "mvo"] = "sepo"


class SweepRequest(BaseModel):
    dataset: DatasetSpec
    beta1_grid: list[float] = Field(min_length=1)
    beta2: float = Field(default=1.0, gt=0.0)
    r_min: float = Field(default=0.1, ge=0.0)
    solver: SolverOptions = SolverOptions()
    jobs: int | None = Field(default=1, ge=1)


class ReportModel(BaseModel):
    expected_return: float
    variance_risk: float
    sparsity_pct: float
    nonzero_count: int
    budget_violation: float
    return_constraint_slack: float


class ResolvedConfig(BaseModel):
    """Every setting that determined the run, including derived values."""

    beta1: float
    beta2: float
    r_min: float
    rho: float
    sigma: float
    epsilon: float
    max_iter: int
    projection: str
    lipschitz: float
    alpha: float


class DatasetInfo(BaseModel):
    fingerprint: str
    n: int
    periods: int
    meta: dict


class SolveResponse(BaseModel):
    method: str
    termination: str
    iterations: int
    lambda_final: float
    budget_violation: float
    fixed_point_residual: float
    asset_ids: list[str]
    weights: list[float]
    objective_trace: list[float]
    report: ReportModel
    config: ResolvedConfig
    dataset: DatasetInfo


class DiagnosticsModel(BaseModel):
    termination: str
    iterations: int
    lambda_final: float
    budget_violation: float
    fixed_point_residual: float


class SweepRowModel(BaseModel):
    beta1: float
    sepo: ReportModel | None = None
    mvo: ReportModel | None = None
    diagnostics_sepo: DiagnosticsModel | None = None
    diagnostics_mvo: DiagnosticsModel | None = None
    error: str | None = None


class RegressionModel(BaseModel):
    response: str
    intercept: float
    slope: float
    slope_std_error: float
    slope_p_value: float
    r_squared: float
    rows_used: int
    rows_excluded: int


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    # Keyed by response name; a response whose fit failed appears in
    # regression_errors instead.
    regressions: dict[str, RegressionModel]
    regression_errors: dict[str, str]
    csv: str
    config: dict
    dataset: dict


class HealthResponse(BaseModel):
    status: str
    version: str
