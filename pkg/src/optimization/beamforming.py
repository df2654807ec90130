"""
Transmit-covariance optimization for a fixed antenna layout.

The auxiliary-variable problem

    max beta1  s.t.  sigma^2 + Tr(H_b V) >= beta1 beta2,  beta2 >= sigma^2 + Tr(H_e V),
                     Tr(H_w V) <= cap,  Tr(V) <= Pmax,  V >= 0,  rank(V) = 1

is handled by an outer loop that (i) replaces beta1 beta2 by its convex upper
bound around the previous (beta1, beta2) and (ii) replaces the rank-one
constraint by the penalty eta (Tr(V) - u^H V u), u being the principal
eigenvector of the previous V. Each inner problem is a small SDP.

Inside the solver every power is divided by sigma^2 and V by Pmax, so the
numbers cvxpy sees are O(1) regardless of the link budget.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional

import cvxpy as cp
import numpy as np

from src.covertness.detectability import CovertBudget
from src.errors import InvalidInputError, RankOneError
from src.models.enums import Link
from src.models.schemas import ScenarioConfig
from src.numerics.linalg import as_hermitian, eig_hermitian, outer_hermitian, principal_component, psd_part
from src.optimization.convex import solve_problem


logger = logging.getLogger(__name__)

BETA_FLOOR = 1e-12


def beta_product_surrogate(beta1, beta2, beta1_anchor, beta2_anchor):
    """
    Convex upper bound of beta1 * beta2 that is tight at the anchor.

    Works on floats, numpy arrays and cvxpy expressions alike.
    """
    gap = beta1_anchor - beta2_anchor
    return (
        0.25 * (beta1 + beta2) ** 2
        - 0.25 * gap ** 2
        - 0.5 * gap * (beta1 - beta1_anchor - beta2 + beta2_anchor)
    )


@dataclass(frozen=True, eq=False)
class BeamformingProblem:
    """Link Gram matrices H_k = h_k h_k^H plus the power budget and loop settings."""
    bob: np.ndarray
    eve: np.ndarray
    willie: np.ndarray
    noise_power: float
    pmax: float
    cap: float
    initial_covariance: Optional[np.ndarray] = None
    penalty_init: float = 1.0
    penalty_growth: float = 1.5
    penalty_ceiling: float = 1e6
    max_iterations: int = 80
    tolerance: float = 1e-4
    rank_one_tolerance: float = 1e-6
    feasibility_tolerance: float = 1e-8
    solver: str = "CLARABEL"

    def __post_init__(self):
        bob, eve, willie = (as_hermitian(m) for m in (self.bob, self.eve, self.willie))
        if not (bob.shape == eve.shape == willie.shape):
            raise InvalidInputError("H_b, H_e and H_w must share one dimension")
        if self.pmax <= 0 or self.noise_power <= 0:
            raise InvalidInputError("Pmax and the noise power must be positive")
        if self.cap < 0:
            raise InvalidInputError("The covert power cap cannot be negative")
        object.__setattr__(self, "bob", bob)
        object.__setattr__(self, "eve", eve)
        object.__setattr__(self, "willie", willie)

    @property
    def dim(self) -> int:
        return self.bob.shape[0]

    @classmethod
    def from_channels(cls, channels: Mapping[Link, np.ndarray], config: ScenarioConfig,
                      budget: CovertBudget, initial_covariance: Optional[np.ndarray] = None) -> "BeamformingProblem":
        """Build the problem from the three row channels h_k^H of a layout."""
        return cls(
            bob=outer_hermitian(channels[Link.BOB]),
            eve=outer_hermitian(channels[Link.EVE]),
            willie=outer_hermitian(channels[Link.WILLIE]),
            noise_power=config.sigma2,
            pmax=config.pmax,
            cap=budget.power_cap,
            initial_covariance=initial_covariance,
            penalty_init=config.penalty_init,
            penalty_growth=config.penalty_growth,
            penalty_ceiling=config.penalty_ceiling,
            max_iterations=config.penalty_max_iterations,
            tolerance=config.beam_tolerance,
            rank_one_tolerance=config.rank_one_tolerance,
            feasibility_tolerance=config.feasibility_tolerance,
            solver=config.cvx_solver,
        )

    def power(self, matrix: np.ndarray, covariance: np.ndarray) -> float:
        return float(np.real(np.trace(matrix @ covariance)))

    def betas(self, covariance: np.ndarray):
        """Tight (beta1, beta2) of a covariance: beta2 in watts, beta1 the SNR ratio."""
        beta2 = self.noise_power + self.power(self.eve, covariance)
        beta1 = (self.noise_power + self.power(self.bob, covariance)) / beta2
        return beta1, beta2


@dataclass(frozen=True)
class ExpansionPoint:
    """Where the inner problem linearizes: principal direction, beta anchors (beta2 in watts), penalty."""
    direction: np.ndarray
    beta1: float
    beta2: float
    penalty: float


@dataclass(frozen=True, eq=False)
class ConvexIterate:
    covariance: np.ndarray
    beta1: float
    beta2: float
    direction: np.ndarray
    penalty: float
    objective: float
    penalty_residual: float
    surrogate_beta1: float


@dataclass(frozen=True, eq=False)
class BeamSolution:
    covariance: np.ndarray
    beamformer: np.ndarray
    beta1: float
    beta2: float
    objective: float
    trace: List[float] = field(default_factory=list)
    rank_one_residual: float = 0.0
    iterations: int = 0
    converged: bool = True


def rank_one_gap(covariance: np.ndarray) -> float:
    """Tr(V) - lambda_max(V), zero exactly when V has rank at most one."""
    eigenvalues = eig_hermitian(covariance).eigenvalues
    return float(np.sum(eigenvalues) - eigenvalues[-1])


def extract_rank_one(covariance: np.ndarray) -> np.ndarray:
    """v = sqrt(lambda_max) u_max, the best rank-one factor of V."""
    largest, direction = principal_component(covariance)
    return math.sqrt(max(largest, 0.0)) * direction


def _range_mask(matrix: np.ndarray, tolerance: float = 1e-12):
    pair = eig_hermitian(matrix)
    scale = max(abs(pair.eigenvalues[-1]), 0.0)
    keep = pair.eigenvalues > tolerance * scale if scale > 0 else np.zeros_like(pair.eigenvalues, dtype=bool)
    return pair, keep


def _null_projector(matrix: np.ndarray, tolerance: float = 1e-12) -> np.ndarray:
    pair, keep = _range_mask(matrix, tolerance)
    basis = pair.eigenvectors[:, keep]
    return np.eye(matrix.shape[0]) - basis @ basis.conj().T


def null_basis(matrix: np.ndarray, tolerance: float = 1e-12) -> np.ndarray:
    """Orthonormal columns spanning the null space of a PSD matrix (n x k, k possibly 0)."""
    pair, keep = _range_mask(matrix, tolerance)
    return pair.eigenvectors[:, ~keep]


def enforce_feasibility(covariance: np.ndarray, problem: BeamformingProblem) -> np.ndarray:
    """Project a solver covariance onto V >= 0, Tr(V) <= Pmax and Tr(H_w V) <= cap exactly."""
    covariance = psd_part(covariance)
    if problem.cap == 0.0:
        projector = _null_projector(problem.willie)
        covariance = psd_part(projector @ covariance @ projector)

    total = float(np.real(np.trace(covariance)))
    if total > problem.pmax:
        covariance = covariance * (problem.pmax / total)

    willie = problem.power(problem.willie, covariance)
    if willie > problem.cap:
        covariance = covariance * (problem.cap / willie) if problem.cap > 0 else np.zeros_like(covariance)
    return covariance


def initial_covariance(problem: BeamformingProblem) -> np.ndarray:
    """
    Full power along Bob's channel, halved until the covert cap holds.

    With a zero cap the direction is first projected away from Willie's
    channel; a direction that vanishes there yields V = 0.
    """
    _, direction = principal_component(problem.bob)
    willie_gain = float(np.real(direction.conj() @ problem.willie @ direction))

    if willie_gain > 0 and problem.cap == 0.0:
        direction = _null_projector(problem.willie) @ direction
        norm = np.linalg.norm(direction)
        if norm <= 1e-12:
            return np.zeros((problem.dim, problem.dim), dtype=complex)
        direction = direction / norm
        willie_gain = 0.0

    power = problem.pmax
    if willie_gain > 0:
        exponent = max(0, math.ceil(math.log2(problem.pmax * willie_gain / problem.cap)))
        power = problem.pmax / 2.0 ** exponent
        while power * willie_gain > problem.cap:
            power /= 2.0
    return enforce_feasibility(power * np.outer(direction, direction.conj()), problem)


def solve_convex_subproblem(problem: BeamformingProblem, point: ExpansionPoint) -> ConvexIterate:
    """One penalized, SCA-linearized inner problem, solved as an SDP."""
    n = problem.dim
    scale = problem.pmax / problem.noise_power
    gram_bob, gram_eve, gram_willie = (scale * m for m in (problem.bob, problem.eve, problem.willie))
    direction = np.asarray(point.direction, dtype=complex)
    off_principal = np.eye(n) - np.outer(direction, direction.conj())

    w = cp.Variable((n, n), hermitian=True)
    beta1 = cp.Variable()
    beta2 = cp.Variable()
    beta2_anchor = point.beta2 / problem.noise_power

    penalty_term = cp.real(cp.trace(off_principal @ w))
    constraints = [
        w >> 0,
        cp.real(cp.trace(w)) <= 1.0,
        beta2 >= 1.0 + cp.real(cp.trace(gram_eve @ w)),
        1.0 + cp.real(cp.trace(gram_bob @ w))
        >= beta_product_surrogate(beta1, beta2, point.beta1, beta2_anchor),
        beta1 >= BETA_FLOOR,
        beta2 >= BETA_FLOOR,
    ]
    # Row scaled by Tr(G_w): the right-hand side is the fraction of Pmax Willie may see.
    willie_gain = float(np.real(np.trace(gram_willie)))
    if willie_gain > 0:
        constraints.append(
            cp.real(cp.trace((gram_willie / willie_gain) @ w)) <= problem.cap / problem.noise_power / willie_gain
        )
    objective = cp.Maximize(beta1 - point.penalty * problem.pmax * penalty_term)
    solve_problem(cp.Problem(objective, constraints), problem.solver, "beamforming subproblem")

    covariance = enforce_feasibility(problem.pmax * w.value, problem)
    tight_beta1, tight_beta2 = problem.betas(covariance)
    residual = float(np.real(np.trace(covariance) - direction.conj() @ covariance @ direction))
    return ConvexIterate(
        covariance=covariance,
        beta1=tight_beta1,
        beta2=tight_beta2,
        direction=direction,
        penalty=point.penalty,
        objective=tight_beta1 - point.penalty * residual,
        penalty_residual=residual,
        surrogate_beta1=float(beta1.value),
    )


def _zero_solution(problem: BeamformingProblem) -> BeamSolution:
    zeros = np.zeros((problem.dim, problem.dim), dtype=complex)
    return BeamSolution(
        covariance=zeros,
        beamformer=np.zeros(problem.dim, dtype=complex),
        beta1=1.0,
        beta2=problem.noise_power,
        objective=1.0,
        trace=[1.0],
    )


def solve_beamforming(problem: BeamformingProblem) -> BeamSolution:
    """
    Penalty/SCA outer loop; returns the covariance and its rank-one beamformer.

    A zero covert cap with a nonzero Willie channel is solved inside the null
    space of H_w and lifted back, so the returned beam nulls Willie exactly.
    """
    if problem.cap == 0.0 and np.any(problem.willie):
        return _solve_null_steering(problem)
    return _solve_penalty_loop(problem)


def _solve_null_steering(problem: BeamformingProblem) -> BeamSolution:
    basis = null_basis(problem.willie)
    if basis.shape[1] == 0:
        return _zero_solution(problem)

    def reduce(matrix):
        return basis.conj().T @ matrix @ basis

    reduced = replace(
        problem,
        bob=reduce(problem.bob),
        eve=reduce(problem.eve),
        willie=np.zeros((basis.shape[1], basis.shape[1]), dtype=complex),
        initial_covariance=None if problem.initial_covariance is None else reduce(problem.initial_covariance),
    )
    logger.debug("zero covert cap: optimizing in a %d-dimensional null space of H_w", basis.shape[1])
    solution = _solve_penalty_loop(reduced)
    return replace(
        solution,
        covariance=basis @ solution.covariance @ basis.conj().T,
        beamformer=basis @ solution.beamformer,
    )


def _solve_penalty_loop(problem: BeamformingProblem) -> BeamSolution:
    if not np.any(problem.bob):
        return _zero_solution(problem)

    if problem.initial_covariance is not None:
        covariance = enforce_feasibility(np.asarray(problem.initial_covariance, dtype=complex), problem)
    else:
        covariance = initial_covariance(problem)
    beta1, beta2 = problem.betas(covariance)
    penalty = problem.penalty_init
    trace = [beta1]
    converged = False
    rank_one = rank_one_gap(covariance) <= problem.rank_one_tolerance * (1.0 + float(np.real(np.trace(covariance))))

    for iteration in range(1, problem.max_iterations + 1):
        _, direction = principal_component(covariance)
        iterate = solve_convex_subproblem(problem, ExpansionPoint(direction, beta1, beta2, penalty))
        previous = beta1

        if iterate.beta1 < previous:
            # beta1 never decreases: a worse iterate is dropped and the penalty still grows.
            logger.debug("penalty iteration %d: rejected beta1=%.9g below %.9g", iteration, iterate.beta1, previous)
            if rank_one:
                converged = True
                break
        else:
            covariance, beta1, beta2 = iterate.covariance, iterate.beta1, iterate.beta2
            trace.append(beta1)

        gap = rank_one_gap(covariance)
        rank_one = gap <= problem.rank_one_tolerance * (1.0 + float(np.real(np.trace(covariance))))
        logger.debug(
            "penalty iteration %d: beta1=%.9g eta=%.3g rank-one gap=%.3e",
            iteration, beta1, penalty, gap,
        )
        if rank_one and abs(beta1 - previous) <= problem.tolerance * abs(previous):
            converged = True
            break

        if penalty >= problem.penalty_ceiling and not rank_one:
            raise RankOneError(
                f"rank-one residual stalled at {gap:.3e} with penalty {penalty:.3g}",
                residuals={"rank_one_gap": gap, "penalty": penalty, "iterations": iteration},
            )
        penalty = min(penalty * problem.penalty_growth, problem.penalty_ceiling)

    if not rank_one:
        raise RankOneError(
            f"covariance not rank one after {problem.max_iterations} iterations",
            residuals={"rank_one_gap": rank_one_gap(covariance), "penalty": penalty},
        )

    beamformer = extract_rank_one(covariance)
    rank_one_covariance = np.outer(beamformer, beamformer.conj())
    gain_bob = problem.power(problem.bob, rank_one_covariance)
    gain_eve = problem.power(problem.eve, rank_one_covariance)
    return BeamSolution(
        covariance=covariance,
        beamformer=beamformer,
        beta1=beta1,
        beta2=beta2,
        objective=(problem.noise_power + gain_bob) / (problem.noise_power + gain_eve),
        trace=trace,
        rank_one_residual=float(np.linalg.norm(covariance - rank_one_covariance)),
        iterations=iteration,
        converged=converged,
    )
