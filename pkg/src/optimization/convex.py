"""Thin wrapper around cvxpy that maps solver outcomes onto fascovert errors."""

from __future__ import annotations

import cvxpy as cp

from src.errors import InfeasibleSubproblemError, SolverError


# Downstream feasibility checks run at 1e-8.
SOLVER_OPTIONS = {
    "CLARABEL": {"tol_gap_abs": 1e-9, "tol_gap_rel": 1e-9, "tol_feas": 1e-9, "max_iter": 300},
}

ACCEPTED_STATUSES = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
INFEASIBLE_STATUSES = (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE)


def solve_problem(problem: cp.Problem, solver: str, context: str) -> float:
    """Solve *problem* in place and return its optimal value."""
    try:
        problem.solve(solver=solver, **SOLVER_OPTIONS.get(solver, {}))
    except cp.error.SolverError as exc:
        raise SolverError(f"{context}: solver {solver} failed: {exc}") from exc

    if problem.status in INFEASIBLE_STATUSES:
        raise InfeasibleSubproblemError(
            f"{context}: subproblem certified infeasible ({problem.status})",
            residuals={"status": problem.status},
        )
    if problem.status not in ACCEPTED_STATUSES:
        raise SolverError(
            f"{context}: solver stopped with status {problem.status}",
            residuals={"status": problem.status},
        )
    return float(problem.value)
