"""Problem data, solver configuration, and objective evaluation.

The model under optimization is a cardinality-penalized mean-variance
portfolio selection:

    minimize   (beta1/2) x'Vx - mu'x + (beta2/2) ||x||^2 + ||x||_0
    subject to mu'x >= r_min,  e'x = 1,  x >= 0

The budget constraint e'x = 1 is handled by an augmented Lagrangian with
multiplier `lam` and penalty `rho`; the smooth part of that Lagrangian is
what `evaluate_smooth` computes, and `evaluate_merit` adds the cardinality
term plus the minimum-return indicator.
"""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass

import numpy as np

# An entry counts as zero for cardinality purposes at or below this magnitude.
ZERO_TOL = 1e-12

# Merit value reported for iterates violating the minimum-return constraint.
# A designated finite sentinel rather than float('inf') so objective traces
# stay finite and no infinity enters arithmetic.
INFEASIBLE_MERIT = sys.float_info.max


class SparsefolioError(Exception):
    """Base class for structured errors raised by this package."""


class DimensionMismatchError(SparsefolioError):
    pass


class ReturnProjectionError(SparsefolioError):
    """Ray-scaling return projection hit a nonpositive portfolio return."""


class DivergenceError(SparsefolioError):
    """An iterate or multiplier became NaN/Inf during a solve."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class InfeasibleProblemError(SparsefolioError):
    """No feasible point exists (or none was found on the search grid)."""


class DataError(SparsefolioError):
    """Malformed or invalid price/return data."""


class Termination(enum.Enum):
    GRADIENT_TOLERANCE = "gradient_tolerance"
    ITERATION_CAP = "iteration_cap"


class ProjectionVariant(enum.Enum):
    # Multiplicative rescaling onto the return boundary (the method's
    # native rule; requires mu'x > 0, not a least-distance projection).
    RAY_SCALING = "ray_scaling"
    # Exact Euclidean projection onto the half-space {x : mu'x >= r_min}.
    HALFSPACE = "halfspace"


def _as_readonly(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PortfolioProblem:
    """Immutable problem instance.

    mu     : expected return per asset, shape (n,)
    cov    : return covariance, shape (n, n), symmetric PSD-ish
    beta1  : variance-risk weight, > 0
    beta2  : diversification (ridge) weight, > 0
    r_min  : minimum acceptable portfolio return, 0 <= r_min <= max(mu)
    """

    mu: np.ndarray
    cov: np.ndarray
    beta1: float
    beta2: float
    r_min: float

    def __post_init__(self):
        mu = _as_readonly(self.mu)
        cov = _as_readonly(self.cov)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)
        if mu.ndim != 1 or mu.size < 1:
            raise DimensionMismatchError("mu must be a 1-d vector with n >= 1")
        n = mu.size
        if cov.shape != (n, n):
            raise DimensionMismatchError(
                f"cov shape {cov.shape} does not match n={n}"
            )
        if not (np.isfinite(mu).all() and np.isfinite(cov).all()):
            raise ValueError("mu and cov must be finite")
        scale = max(1.0, float(np.abs(cov).max()))
        if np.abs(cov - cov.T).max() > 1e-12 * scale:
            raise ValueError("cov must be symmetric (1e-12 relative tolerance)")
        if not (self.beta1 > 0 and self.beta2 > 0):
            raise ValueError("beta1 and beta2 must be positive")
        if not (0.0 <= self.r_min <= float(mu.max())):
            raise ValueError(
                f"r_min={self.r_min} outside [0, max(mu)={float(mu.max())}]"
            )

    @property
    def n(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm knobs; defaults follow the shipped method settings.

    sigma=None means "derive 1/(8 n^2) from the problem size at solve time"
    (threshold sqrt(2 sigma) = 1/(2n), half the equal weight).
    """

    rho: float = 5.0
    sigma: float | None = None
    epsilon: float = 1e-7
    max_iter: int = 10000
    projection_variant: ProjectionVariant = ProjectionVariant.RAY_SCALING
    lambda_update_enabled: bool = True
    # Disabling the return projection yields a pure thresholded gradient
    # loop; used by descent diagnostics, not by normal solves.
    projection_enabled: bool = True
    tie_break_to_zero: bool = True

    def __post_init__(self):
        if not self.rho > 4.0:
            raise ValueError("rho must exceed 4")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive when given")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def resolved_sigma(self, n: int) -> float:
        return self.sigma if self.sigma is not None else default_sigma(n)


def default_sigma(n: int) -> float:
    """Default cardinality trade-off: 1/(8 n^2)."""
    return 1.0 / (8.0 * n * n)


@dataclass(frozen=True)
class SolverResult:
    weights: np.ndarray
    lambda_final: float
    iterations: int
    termination: Termination
    objective_trace: np.ndarray  # merit per iterate, length iterations + 1
    budget_violation: float  # |e'x - 1| at the final iterate
    fixed_point_residual: float  # ||x - prox step at x||_2 at termination
    # Diagnostics echoed for reproducibility.
    sigma: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_readonly(self.weights))
        object.__setattr__(
            self, "objective_trace", _as_readonly(self.objective_trace)
        )


@dataclass(frozen=True)
class PortfolioReport:
    expected_return: float
    variance_risk: float
    sparsity_pct: float
    nonzero_count: int
    budget_violation: float
    return_constraint_slack: float


def l0_norm(x: np.ndarray) -> int:
    """Number of entries with |x_i| > ZERO_TOL."""
    return int(np.count_nonzero(np.abs(np.asarray(x)) > ZERO_TOL))


def _check_vector(problem: PortfolioProblem, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != problem.mu.shape:
        raise DimensionMismatchError(
            f"x shape {x.shape} does not match n={problem.n}"
        )
    return x


def evaluate_smooth(
    problem: PortfolioProblem, x: np.ndarray, lam: float, rho: float
) -> float:
    """Smooth part of the augmented Lagrangian at (x, lam).

    (beta1/2) x'Vx - mu'x + (beta2/2) ||x||^2
        + lam (e'x - 1) + (rho/2) (e'x - 1)^2
    """
    x = _check_vector(problem, x)
    budget = float(x.sum()) - 1.0
    quad = float(x @ (problem.cov @ x))
    return (
        0.5 * problem.beta1 * quad
        - float(problem.mu @ x)
        + 0.5 * problem.beta2 * float(x @ x)
        + lam * budget
        + 0.5 * rho * budget * budget
    )


def evaluate_merit(
    problem: PortfolioProblem, x: np.ndarray, lam: float, cfg: SolverConfig
) -> float:
    """Merit = smooth part + ||x||_0, or INFEASIBLE_MERIT below r_min."""
    x = _check_vector(problem, x)
    if float(problem.mu @ x) < problem.r_min:
        return INFEASIBLE_MERIT
    return evaluate_smooth(problem, x, lam, cfg.rho) + l0_norm(x)


def build_report(problem: PortfolioProblem, x: np.ndarray) -> PortfolioReport:
    """Summary metrics of a weight vector against a problem instance."""
    x = _check_vector(problem, x)
    nonzero = l0_norm(x)
    n = problem.n
    er = float(problem.mu @ x)
    return PortfolioReport(
        expected_return=er,
        variance_risk=float(x @ (problem.cov @ x)),
        sparsity_pct=100.0 * (n - nonzero) / n,
        nonzero_count=nonzero,
        budget_violation=abs(float(x.sum()) - 1.0),
        return_constraint_slack=er - problem.r_min,
    )
