"""Sparse equity portfolio optimization toolkit.

Core pieces: a cardinality-penalized mean-variance solver (SEPO) with a
dense baseline (MVO), price/return ingestion, a brute-force verification
oracle for tiny instances, sweep/regression analytics, an HTTP service,
and a command-line client.
"""

__version__ = "0.1.0"

from .analytics import (
    RegressionSummary,
    ResponseVariable,
    SweepResult,
    SweepRow,
    regress_on_beta1,
    run_sweep,
)
from .data import (
    PriceTable,
    ReturnsDataset,
    compute_returns,
    fingerprint,
    generate_synthetic,
    load_prices_csv,
)
from .model import (
    INFEASIBLE_MERIT,
    ZERO_TOL,
    DataError,
    DimensionMismatchError,
    DivergenceError,
    InfeasibleProblemError,
    PortfolioProblem,
    PortfolioReport,
    ProjectionVariant,
    ReturnProjectionError,
    SolverConfig,
    SolverResult,
    SparsefolioError,
    Termination,
    build_report,
    default_sigma,
    evaluate_merit,
    evaluate_smooth,
    l0_norm,
)
from .oracle import oracle_solve
from .proximal import grad_smooth, lipschitz_estimate, project_return, prox_l0
from .solver import solve_mvo_baseline, solve_sepo

__all__ = [
    "INFEASIBLE_MERIT",
    "ZERO_TOL",
    "DataError",
    "DimensionMismatchError",
    "DivergenceError",
    "InfeasibleProblemError",
    "PortfolioProblem",
    "PortfolioReport",
    "PriceTable",
    "ProjectionVariant",
    "RegressionSummary",
    "ResponseVariable",
    "ReturnProjectionError",
    "ReturnsDataset",
    "SolverConfig",
    "SolverResult",
    "SparsefolioError",
    "SweepResult",
    "SweepRow",
    "Termination",
    "build_report",
    "compute_returns",
    "default_sigma",
    "evaluate_merit",
    "evaluate_smooth",
    "fingerprint",
    "generate_synthetic",
    "grad_smooth",
    "l0_norm",
    "lipschitz_estimate",
    "load_prices_csv",
    "oracle_solve",
    "project_return",
    "prox_l0",
    "regress_on_beta1",
    "run_sweep",
    "solve_mvo_baseline",
    "solve_sepo",
    "__version__",
]
