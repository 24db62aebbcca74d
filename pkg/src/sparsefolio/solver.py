"""Augmented-Lagrangian proximal-gradient solver and its dense baseline.

One loop drives both entry points. Each iteration takes a gradient step on
the smooth augmented Lagrangian with fixed step 1/L (L from
`lipschitz_estimate`), applies the hard-threshold prox (identity for the
baseline), projects back onto the minimum-return half-space, then updates
the budget multiplier. Stops when the smooth gradient norm at the new
iterate drops below epsilon, or after max_iter weight updates.
"""

from __future__ import annotations

import numpy as np

from .model import (
    DimensionMismatchError,
    DivergenceError,
    PortfolioProblem,
    ReturnProjectionError,
    SolverConfig,
    SolverResult,
    Termination,
    evaluate_merit,
)
from .proximal import grad_smooth, lipschitz_estimate, project_return, prox_l0


def _run(
    problem: PortfolioProblem,
    cfg: SolverConfig,
    x0: np.ndarray | None,
    threshold: bool,
) -> SolverResult:
    n = problem.n
    if x0 is None:
        x = np.full(n, 1.0 / n)
    else:
        x = np.array(x0, dtype=float, copy=True)
        if x.shape != (n,):
            raise DimensionMismatchError(
                f"x0 shape {x.shape} does not match n={n}"
            )
    lam = 0.0
    rho = cfg.rho
    sigma = cfg.resolved_sigma(n)
    lip = lipschitz_estimate(problem, rho)
    alpha = 1.0 / lip

    def prox_step(v: np.ndarray) -> np.ndarray:
        if threshold:
            return prox_l0(v, sigma, cfg.tie_break_to_zero)
        return v

    trace = [evaluate_merit(problem, x, lam, cfg)]
    g = grad_smooth(problem, x, lam, rho)
    termination = Termination.ITERATION_CAP
    iterations = cfg.max_iter
    for k in range(1, cfg.max_iter + 1):
        x_new = prox_step(x - alpha * g)
        if cfg.projection_enabled:
            try:
                x_new = project_return(
                    x_new, problem.mu, problem.r_min, cfg.projection_variant
                )
            except ReturnProjectionError as e:
                raise ReturnProjectionError(f"{e} (iteration {k})") from e
        if cfg.lambda_update_enabled:
            lam = lam + rho * (float(x_new.sum()) - 1.0)
        if not (np.isfinite(x_new).all() and np.isfinite(lam)):
            raise DivergenceError(
                f"non-finite iterate at iteration {k}", iteration=k
            )
        x = x_new
        trace.append(evaluate_merit(problem, x, lam, cfg))
        g = grad_smooth(problem, x, lam, rho)
        if float(np.linalg.norm(g)) < cfg.epsilon:
            termination = Termination.GRADIENT_TOLERANCE
            iterations = k
            break

    residual = float(np.linalg.norm(x - prox_step(x - alpha * g)))
    return SolverResult(
        weights=x,
        lambda_final=lam,
        iterations=iterations,
        termination=termination,
        objective_trace=np.asarray(trace),
        budget_violation=abs(float(x.sum()) - 1.0),
        fixed_point_residual=residual,
        sigma=sigma,
        alpha=alpha,
    )


def solve_sepo(
    problem: PortfolioProblem,
    cfg: SolverConfig = SolverConfig(),
    x0: np.ndarray | None = None,
) -> SolverResult:
    """Sparse solve: hard-threshold prox active, budget multiplier updated.

    Starts from the equally weighted portfolio unless x0 is given.
    Deterministic: identical inputs produce bitwise-identical results.
    """
    return _run(problem, cfg, x0, threshold=True)


def solve_mvo_baseline(
    problem: PortfolioProblem,
    cfg: SolverConfig = SolverConfig(),
    x0: np.ndarray | None = None,
) -> SolverResult:
    """Dense baseline: the identical loop with the prox replaced by the
    identity map (no thresholding). May hold short positions, since
    nonnegativity is only ever enforced by the threshold."""
    return _run(problem, cfg, x0, threshold=False)
