"""HTTP service exposing the portfolio solver and sweep pipeline.

Run with `sparsefolio serve` or `uvicorn sparsefolio.service.app:app`.
Parameter/data problems map to 400; solver failures (divergence,
undefined projection) map to 500.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..analytics import (
    ResponseVariable,
    regress_on_beta1,
    run_sweep,
    sweep_csv,
)
from ..data import (
    ReturnsDataset,
    compute_returns,
    fingerprint,
    generate_synthetic,
    load_prices_csv_text,
)
from ..model import (
    DataError,
    PortfolioProblem,
    ProjectionVariant,
    SolverConfig,
    SparsefolioError,
    build_report,
)
from ..proximal import lipschitz_estimate
from ..solver import solve_mvo_baseline, solve_sepo
from .schemas import (
    DatasetInfo,
    DatasetSpec,
    DiagnosticsModel,
    HealthResponse,
    RegressionModel,
    ReportModel,
    ResolvedConfig,
    SolveRequest,
    SolveResponse,
    SolverOptions,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
)

app = FastAPI(title="sparsefolio", version=__version__)

_VARIANTS = {
    "paper": ProjectionVariant.RAY_SCALING,
    "euclidean": ProjectionVariant.HALFSPACE,
}


def _build_dataset(spec: DatasetSpec) -> ReturnsDataset:
    try:
        if spec.synthetic is not None:
            s = spec.synthetic
            return generate_synthetic(s.n, s.periods, s.seed, s.sectors)
        return compute_returns(
            load_prices_csv_text(spec.prices_csv, name=spec.name or "<request>")
        )
    except DataError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


def _build_cfg(opts: SolverOptions) -> SolverConfig:
    return SolverConfig(
        rho=opts.rho,
        sigma=opts.sigma,
        epsilon=opts.epsilon,
        max_iter=opts.max_iter,
        projection_variant=_VARIANTS[opts.projection],
    )


def _build_problem(
    dataset: ReturnsDataset, beta1: float, beta2: float, r_min: float
) -> PortfolioProblem:
    try:
        return PortfolioProblem(
            mu=dataset.mu_hat,
            cov=dataset.cov_hat,
            beta1=beta1,
            beta2=beta2,
            r_min=r_min,
        )
    except (ValueError, SparsefolioError) as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


def _dataset_info(dataset: ReturnsDataset) -> DatasetInfo:
    return DatasetInfo(
        fingerprint=fingerprint(dataset),
        n=dataset.n,
        periods=dataset.periods,
        meta=dict(dataset.meta),
    )


def _report_model(rep) -> ReportModel:
    return ReportModel(
        expected_return=rep.expected_return,
        variance_risk=rep.variance_risk,
        sparsity_pct=rep.sparsity_pct,
        nonzero_count=rep.nonzero_count,
        budget_violation=rep.budget_violation,
        return_constraint_slack=rep.return_constraint_slack,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    dataset = _build_dataset(req.dataset)
    problem = _build_problem(dataset, req.beta1, req.beta2, req.r_min)
    cfg = _build_cfg(req.solver)
    solver = solve_sepo if req.method == "sepo" else solve_mvo_baseline
    try:
        result = solver(problem, cfg)
    except SparsefolioError as e:
        raise HTTPException(status_code=500, detail=str(e)) from e
    report = build_report(problem, result.weights)
    return SolveResponse(
        method=req.method,
        termination=result.termination.value,
        iterations=result.iterations,
        lambda_final=result.lambda_final,
        budget_violation=result.budget_violation,
        fixed_point_residual=result.fixed_point_residual,
        asset_ids=list(dataset.asset_ids),
        weights=[float(w) for w in result.weights],
        objective_trace=[float(v) for v in result.objective_trace],
        report=_report_model(report),
        config=ResolvedConfig(
            beta1=req.beta1,
            beta2=req.beta2,
            r_min=req.r_min,
            rho=cfg.rho,
            sigma=result.sigma,
            epsilon=cfg.epsilon,
            max_iter=cfg.max_iter,
            projection=req.solver.projection,
            lipschitz=lipschitz_estimate(problem, cfg.rho),
            alpha=result.alpha,
        ),
        dataset=_dataset_info(dataset),
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest) -> SweepResponse:
    dataset = _build_dataset(req.dataset)
    cfg = _build_cfg(req.solver)
    try:
        result = run_sweep(
            dataset,
            req.beta1_grid,
            beta2=req.beta2,
            r_min=req.r_min,
            cfg=cfg,
            jobs=req.jobs,
        )
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e

    rows = []
    for r in result.rows:
        if r.error is None:
            rows.append(
                SweepRowModel(
                    beta1=r.beta1,
                    sepo=_report_model(r.sepo),
                    mvo=_report_model(r.mvo),
                    diagnostics_sepo=DiagnosticsModel(
                        termination=r.result_sepo.termination.value,
                        iterations=r.result_sepo.iterations,
                        lambda_final=r.result_sepo.lambda_final,
                        budget_violation=r.result_sepo.budget_violation,
                        fixed_point_residual=r.result_sepo.fixed_point_residual,
                    ),
                    diagnostics_mvo=DiagnosticsModel(
                        termination=r.result_mvo.termination.value,
                        iterations=r.result_mvo.iterations,
                        lambda_final=r.result_mvo.lambda_final,
                        budget_violation=r.result_mvo.budget_violation,
                        fixed_point_residual=r.result_mvo.fixed_point_residual,
                    ),
                )
            )
        else:
            rows.append(SweepRowModel(beta1=r.beta1, error=r.error))

    regressions: dict[str, RegressionModel] = {}
    regression_errors: dict[str, str] = {}
    for response in ResponseVariable:
        try:
            s = regress_on_beta1(result, response)
            regressions[response.value] = RegressionModel(
                response=s.response,
                intercept=s.intercept,
                slope=s.slope,
                slope_std_error=s.slope_std_error,
                slope_p_value=s.slope_p_value,
                r_squared=s.r_squared,
                rows_used=s.rows_used,
                rows_excluded=s.rows_excluded,
            )
        except ValueError as e:
            regression_errors[response.value] = str(e)

    return SweepResponse(
        rows=rows,
        regressions=regressions,
        regression_errors=regression_errors,
        csv=sweep_csv(result),
        config=result.config,
        dataset=result.dataset,
    )
