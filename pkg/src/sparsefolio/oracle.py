"""Brute-force reference solver for tiny instances.

Enumerates every nonempty support (2^n - 1 of them, n <= 6), grid-searches
the budget simplex slice restricted to that support under the
minimum-return constraint, and adds the support size as the cardinality
term. Shares no code with the iterative solver on purpose: this is the
ground truth the solver is checked against.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import chain, combinations

import numpy as np

from .model import InfeasibleProblemError, PortfolioProblem, l0_norm


def default_grid_step(n: int) -> float:
    if n <= 3:
        return 1e-3
    return 1e-2


@lru_cache(maxsize=None)
def _comp_table(total: int, parts: int) -> np.ndarray:
    """All compositions of `total` into `parts` nonnegative ints, lex order."""
    if parts == 1:
        out = np.array([[total]], dtype=np.int16)
    else:
        blocks = []
        for first in range(total + 1):
            tail = _comp_table(total - first, parts - 1)
            head = np.full((tail.shape[0], 1), first, dtype=np.int16)
            blocks.append(np.hstack([head, tail]))
        out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def _iter_heads(budget: int, levels: int):
    # Leading-coordinate tuples (ascending lex) and the budget they leave.
    if levels == 0:
        yield (), budget
        return
    for k in range(budget + 1):
        for tail, rem in _iter_heads(budget - k, levels - 1):
            yield (k,) + tail, rem


def _composition_chunks(total: int, parts: int):
    """Yield int arrays whose rows cover all compositions of total into
    parts, in ascending lex order. Tables with more than 4 free parts are
    streamed by fixing leading coordinates, which keeps the cached tables
    small and reusable across supports and instances."""
    direct = min(parts, 4)
    for head, rem in _iter_heads(total, parts - direct):
        tail = _comp_table(rem, direct)
        if not head:
            yield tail
            continue
        block = np.empty((tail.shape[0], parts), dtype=np.int16)
        block[:, : len(head)] = np.asarray(head, dtype=np.int16)
        block[:, len(head):] = tail
        yield block


def _best_on_support(
    support: tuple[int, ...],
    problem: PortfolioProblem,
    grid_parts: int,
) -> tuple[float, np.ndarray] | None:
    """Min of the smooth objective over the strictly positive grid points
    of the simplex slice on `support`, honoring mu'x >= r_min. None if no
    grid point on this support is feasible."""
    m = len(support)
    if m > grid_parts:
        return None  # fewer grid units than assets: no strictly positive point
    idx = np.asarray(support)
    mu_s = problem.mu[idx]
    cov_ss = problem.cov[np.ix_(idx, idx)]
    k = float(grid_parts)
    best_val = np.inf
    best_x = None
    # Strictly positive compositions: every on-support weight >= 1/K, so
    # each grid point's true support is exactly `support`.
    for chunk in _composition_chunks(grid_parts - m, m):
        x = (chunk + 1.0) / k
        feasible = x @ mu_s >= problem.r_min
        if not feasible.any():
            continue
        xf = x[feasible]
        quad = np.einsum("ij,jk,ik->i", xf, cov_ss, xf)
        obj = (
            0.5 * problem.beta1 * quad
            - xf @ mu_s
            + 0.5 * problem.beta2 * np.einsum("ij,ij->i", xf, xf)
        )
        j = int(np.argmin(obj))
        if obj[j] < best_val:
            best_val = float(obj[j])
            best_x = xf[j]
    if best_x is None:
        return None
    return best_val, best_x


def oracle_solve(
    problem: PortfolioProblem, grid_step: float | None = None
) -> tuple[np.ndarray, float]:
    """Exhaustive reference optimum of the cardinality-penalized objective.

    Returns (weights, objective) where objective includes the support size.
    Ties between supports go to the lexicographically smallest support.
    Cost grows as 2^n times the grid size; n is capped at 6.
    """
    n = problem.n
    if n > 6:
        raise ValueError(f"oracle limited to n <= 6, got n={n}")
    if grid_step is None:
        grid_step = default_grid_step(n)
    if not 0.0 < grid_step <= 1.0:
        raise ValueError("grid_step must lie in (0, 1]")
    grid_parts = int(round(1.0 / grid_step))
    if grid_parts < 1:
        raise ValueError("grid_step too coarse: fewer than one grid unit")
    if problem.r_min > float(problem.mu.max()):
        raise InfeasibleProblemError(
            f"max attainable simplex return {float(problem.mu.max())} "
            f"is below r_min={problem.r_min}"
        )

    best_val = np.inf
    best_x = None
    supports = sorted(
        chain.from_iterable(
            combinations(range(n), m) for m in range(1, n + 1)
        )
    )
    for support in supports:
        hit = _best_on_support(support, problem, grid_parts)
        if hit is None:
            continue
        val, x_s = hit
        total = val + len(support)
        if total < best_val:
            best_val = total
            x = np.zeros(n)
            x[list(support)] = x_s
            best_x = x
    if best_x is None:
        raise InfeasibleProblemError(
            "no grid point satisfies the minimum-return constraint"
        )
    return best_x, float(best_val)


def oracle_gap_bound(problem: PortfolioProblem, grid_step: float) -> float:
    """How far the grid optimum can sit above the continuous optimum.

    Lipschitz constant of the smooth objective over the simplex
    (beta1 ||V||_F + ||mu||_2 + beta2) times the grid offset h sqrt(n).
    """
    lip = (
        problem.beta1 * float(np.sqrt(np.sum(problem.cov * problem.cov)))
        + float(np.linalg.norm(problem.mu))
        + problem.beta2
    )
    return lip * grid_step * float(np.sqrt(problem.n))


def penalized_objective(problem: PortfolioProblem, x: np.ndarray) -> float:
    """The constrained model's objective at x: smooth terms + cardinality.

    Used to compare solver output against the oracle on a common scale.
    """
    x = np.asarray(x, dtype=float)
    return (
        0.5 * problem.beta1 * float(x @ (problem.cov @ x))
        - float(problem.mu @ x)
        + 0.5 * problem.beta2 * float(x @ x)
        + l0_norm(x)
    )
