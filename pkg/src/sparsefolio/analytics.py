"""Parameter sweeps over the risk weight and OLS fits of the results.

A sweep solves both the sparse model and the dense baseline across a grid
of beta1 values on one dataset, then the regression helper fits
response = a + b * beta1 by ordinary least squares with a two-sided
t-test on the slope (T-2 degrees of freedom, tail probability via the
regularized incomplete beta function).
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import betainc

from .data import ReturnsDataset, fingerprint
from .model import (
    PortfolioProblem,
    PortfolioReport,
    SolverConfig,
    SolverResult,
    SparsefolioError,
    build_report,
)
from .serialize import csv_lines
from .solver import solve_mvo_baseline, solve_sepo

SWEEP_CSV_COLUMNS = [
    "beta1",
    "er_sepo",
    "vr_sepo",
    "spar_sepo",
    "er_mvo",
    "vr_mvo",
    "spar_mvo",
    "iters_sepo",
    "budget_violation_sepo",
]


class ResponseVariable(enum.Enum):
    EXPECTED_RETURN = "expected_return"
    VARIANCE_RISK = "variance_risk"
    SPARSITY = "sparsity"


@dataclass(frozen=True)
class SweepRow:
    beta1: float
    sepo: PortfolioReport | None
    mvo: PortfolioReport | None
    result_sepo: SolverResult | None
    result_mvo: SolverResult | None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    config: dict  # resolved solver/model settings shared by every row
    dataset: dict  # fingerprint and provenance of the input data


@dataclass(frozen=True)
class RegressionSummary:
    response: str
    intercept: float
    slope: float
    slope_std_error: float
    slope_p_value: float
    r_squared: float
    rows_used: int
    rows_excluded: int


def _sweep_row(task) -> SweepRow:
    mu, cov, beta1, beta2, r_min, cfg = task
    try:
        problem = PortfolioProblem(
            mu=mu, cov=cov, beta1=beta1, beta2=beta2, r_min=r_min
        )
        rs = solve_sepo(problem, cfg)
        rm = solve_mvo_baseline(problem, cfg)
    except (SparsefolioError, ValueError) as e:
        return SweepRow(beta1, None, None, None, None, f"{type(e).__name__}: {e}")
    return SweepRow(
        beta1=beta1,
        sepo=build_report(problem, rs.weights),
        mvo=build_report(problem, rm.weights),
        result_sepo=rs,
        result_mvo=rm,
    )


def run_sweep(
    dataset: ReturnsDataset,
    beta1_grid,
    beta2: float = 1.0,
    r_min: float = 0.1,
    cfg: SolverConfig = SolverConfig(),
    jobs: int | None = 1,
) -> SweepResult:
    """Solve sparse + baseline across beta1_grid on one dataset.

    jobs=None picks min(len(grid), cpu count); jobs>1 fans rows out to
    worker processes. Row order and values are independent of jobs. A row
    whose solve fails is kept with its error message rather than aborting
    the sweep.
    """
    grid = [float(b) for b in beta1_grid]
    if not grid:
        raise ValueError("beta1_grid is empty")
    if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
        raise ValueError("beta1_grid must be strictly increasing")
    if grid[0] <= 0.0:
        raise ValueError("beta1 values must be positive")
    cfg = replace(cfg, sigma=cfg.resolved_sigma(dataset.n))
    tasks = [
        (dataset.mu_hat, dataset.cov_hat, b1, beta2, r_min, cfg) for b1 in grid
    ]
    if jobs is None:
        jobs = max(1, min(len(grid), os.cpu_count() or 1))
    if jobs < 1:
        raise ValueError("jobs must be positive")
    if jobs == 1 or len(grid) == 1:
        rows = [_sweep_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(grid))) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    config = {
        "beta2": beta2,
        "r_min": r_min,
        "rho": cfg.rho,
        "sigma": cfg.sigma,
        "epsilon": cfg.epsilon,
        "max_iter": cfg.max_iter,
        "projection": "paper"
        if cfg.projection_variant.name == "RAY_SCALING"
        else "euclidean",
    }
    ds_info = {"fingerprint": fingerprint(dataset), "n": dataset.n}
    ds_info.update(dataset.meta)
    return SweepResult(rows=tuple(rows), config=config, dataset=ds_info)


def regress_on_beta1(
    sweep: SweepResult, response: ResponseVariable
) -> RegressionSummary:
    """OLS fit of a sparse-solver response against beta1.

    Degenerate cases: a constant response gives slope 0, p-value 1 and
    r_squared 0; an exact non-constant line gives standard error 0 and
    p-value 0.
    """
    used = [r for r in sweep.rows if r.error is None]
    excluded = len(sweep.rows) - len(used)
    if len(used) < 3:
        raise ValueError(
            f"need at least 3 successful sweep rows, got {len(used)}"
        )
    x = np.array([r.beta1 for r in used])
    field = {
        ResponseVariable.EXPECTED_RETURN: "expected_return",
        ResponseVariable.VARIANCE_RISK: "variance_risk",
        ResponseVariable.SPARSITY: "sparsity_pct",
    }[response]
    y = np.array([getattr(r.sepo, field) for r in used])
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate design: all beta1 values equal")

    m = x.size
    xbar = float(x.mean())
    ybar = float(y.mean())
    sxx = float(((x - xbar) ** 2).sum())
    sxy = float(((x - xbar) * (y - ybar)).sum())
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    resid = y - intercept - slope * x
    ss_res = float(resid @ resid)
    ss_tot = float(((y - ybar) ** 2).sum())
    dof = m - 2
    se = math.sqrt(ss_res / dof / sxx)
    if se > 0.0:
        t = slope / se
        # Two-sided tail of Student's t with dof degrees of freedom.
        p = float(betainc(0.5 * dof, 0.5, dof / (dof + t * t)))
    else:
        p = 0.0 if slope != 0.0 else 1.0
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    return RegressionSummary(
        response=response.value,
        intercept=intercept,
        slope=slope,
        slope_std_error=se,
        slope_p_value=p,
        r_squared=r2,
        rows_used=len(used),
        rows_excluded=excluded,
    )


def sweep_csv(sweep: SweepResult) -> str:
    """Fixed-column sweep table; failed rows keep beta1 with empty metric cells."""
    comments = dict(sweep.config)
    comments.update({f"dataset_{k}": v for k, v in sweep.dataset.items()})
    rows = []
    for r in sweep.rows:
        if r.error is None:
            rows.append(
                [
                    r.beta1,
                    r.sepo.expected_return,
                    r.sepo.variance_risk,
                    r.sepo.sparsity_pct,
                    r.mvo.expected_return,
                    r.mvo.variance_risk,
                    r.mvo.sparsity_pct,
                    r.result_sepo.iterations,
                    r.result_sepo.budget_violation,
                ]
            )
        else:
            rows.append([r.beta1] + [None] * 8)
    return csv_lines(SWEEP_CSV_COLUMNS, rows, comments)


def _report_dict(rep: PortfolioReport) -> dict:
    return {
        "expected_return": rep.expected_return,
        "variance_risk": rep.variance_risk,
        "sparsity_pct": rep.sparsity_pct,
        "nonzero_count": rep.nonzero_count,
        "budget_violation": rep.budget_violation,
        "return_constraint_slack": rep.return_constraint_slack,
    }


def _diag_dict(res: SolverResult) -> dict:
    return {
        "termination": res.termination.value,
        "iterations": res.iterations,
        "lambda_final": res.lambda_final,
        "budget_violation": res.budget_violation,
        "fixed_point_residual": res.fixed_point_residual,
    }


def sweep_json_doc(sweep: SweepResult) -> dict:
    """Structured sweep document (per-row traces omitted to keep it small)."""
    rows = []
    for r in sweep.rows:
        if r.error is None:
            rows.append(
                {
                    "beta1": r.beta1,
                    "sepo": _report_dict(r.sepo),
                    "mvo": _report_dict(r.mvo),
                    "diagnostics_sepo": _diag_dict(r.result_sepo),
                    "diagnostics_mvo": _diag_dict(r.result_mvo),
                    "error": None,
                }
            )
        else:
            rows.append({"beta1": r.beta1, "error": r.error})
    return {"config": sweep.config, "dataset": sweep.dataset, "rows": rows}


def regression_json_doc(summary: RegressionSummary, sweep: SweepResult) -> dict:
    return {
        "config": sweep.config,
        "dataset": sweep.dataset,
        "regression": {
            "response": summary.response,
            "intercept": summary.intercept,
            "slope": summary.slope,
            "slope_std_error": summary.slope_std_error,
            "slope_p_value": summary.slope_p_value,
            "r_squared": summary.r_squared,
            "rows_used": summary.rows_used,
            "rows_excluded": summary.rows_excluded,
        },
    }
