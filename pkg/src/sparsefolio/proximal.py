"""Gradient, step-size bound, hard-threshold prox, and return projection.

These are the per-iteration building blocks of the solver loop. All
functions are pure and operate on plain numpy arrays.
"""

from __future__ import annotations

import numpy as np

from .model import (
    DimensionMismatchError,
    PortfolioProblem,
    ProjectionVariant,
    ReturnProjectionError,
    _check_vector,
)


def grad_smooth(
    problem: PortfolioProblem, x: np.ndarray, lam: float, rho: float
) -> np.ndarray:
    """Gradient of the smooth augmented-Lagrangian part at (x, lam).

    beta1 V x - mu + beta2 x + lam e + rho (e'x - 1) e
    """
    x = _check_vector(problem, x)
    budget = float(x.sum()) - 1.0
    return (
        problem.beta1 * (problem.cov @ x)
        - problem.mu
        + problem.beta2 * x
        + (lam + rho * budget)
    )


def lipschitz_estimate(problem: PortfolioProblem, rho: float) -> float:
    """Upper bound on the gradient's Lipschitz constant.

    beta1 sqrt(tr(V V')) + beta2 sqrt(n) + rho n, a Frobenius-norm bound
    on ||beta1 V + beta2 I + rho e e'||. Always >= the true constant, so
    1/L is a safe step size.
    """
    n = problem.n
    frob = float(np.sqrt(np.sum(problem.cov * problem.cov)))
    return problem.beta1 * frob + problem.beta2 * float(np.sqrt(n)) + rho * n


def prox_l0(
    x: np.ndarray, sigma: float, tie_break_to_zero: bool = True
) -> np.ndarray:
    """Hard threshold at sqrt(2 sigma), one-sided on the signed value.

    Componentwise: 0 if x_i < sqrt(2 sigma), x_i if x_i > sqrt(2 sigma);
    at exact equality both minimize, and `tie_break_to_zero` picks. The
    comparison is on x_i itself, not |x_i|, so every negative component
    maps to 0, which is what keeps solver iterates nonnegative.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    thr = np.sqrt(2.0 * sigma)
    if tie_break_to_zero:
        keep = x > thr
    else:
        keep = x >= thr
    return np.where(keep, x, 0.0)


def project_return(
    x: np.ndarray,
    mu: np.ndarray,
    r_min: float,
    variant: ProjectionVariant = ProjectionVariant.RAY_SCALING,
) -> np.ndarray:
    """Map x into the half-space {y : mu'y >= r_min}; identity if already in.

    RAY_SCALING multiplies x by r_min / mu'x (undefined at mu'x <= 0);
    HALFSPACE is the exact Euclidean projection x + ((r_min - mu'x)/||mu||^2) mu.
    """
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if x.shape != mu.shape:
        raise DimensionMismatchError(
            f"x shape {x.shape} does not match mu shape {mu.shape}"
        )
    ret = float(mu @ x)
    if ret >= r_min:
        return x
    if variant is ProjectionVariant.RAY_SCALING:
        if ret <= 0.0:
            raise ReturnProjectionError(
                "return projection undefined at nonpositive portfolio return"
            )
        return (r_min / ret) * x
    return x + ((r_min - ret) / float(mu @ mu)) * mu
