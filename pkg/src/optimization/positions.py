"""
Single-antenna position update by minorization-maximization.

With the beamformer and every other antenna fixed, the received power of link
k is a function of antenna n's position t only through the field response f(t):

    Tr(H_k V) = alpha + f(t)^H Psi f(t) + 2 Re{f(t)^H Omega}.

Bob's power is replaced by a concave quadratic lower bound, Eve's and
Willie's by convex quadratic upper bounds, all tight at the current position.
The minimum-spacing constraints are linearized around the current position,
which keeps the feasible set an inner approximation. The resulting problem in
(t, beta1, beta2) is convex and goes to cvxpy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import cvxpy as cp
import numpy as np

from src.channel.channel_model import ChannelRealization, true_traces
from src.channel.geometry import field_response_matrix, path_directions
from src.channel.layout import AntennaLayout
from src.covertness.detectability import CovertBudget, within_cap
from src.errors import DegenerateGeometryError
from src.models.enums import Link
from src.models.schemas import ScenarioConfig
from src.numerics.linalg import outer_hermitian
from src.optimization.beamforming import BETA_FLOOR, beta_product_surrogate, extract_rank_one
from src.optimization.convex import solve_problem


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TraceDecomposition:
    """Split of Tr(H_k V) into the part fixed by the other antennas and the part that moves with antenna n."""
    link: Link
    alpha: float
    omega: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    directions: np.ndarray
    wavelength: float

    def field_response(self, position) -> np.ndarray:
        offsets = np.asarray(position, dtype=float) @ self.directions.T
        return np.exp(1j * 2.0 * np.pi / self.wavelength * offsets)

    def trace(self, position) -> np.ndarray:
        """Exact Tr(H_k V) with antenna n moved to *position* (vectorized over leading axes)."""
        f = self.field_response(position)
        quadratic = np.einsum("...i,ij,...j->...", f.conj(), self.psi, f).real
        cross = 2.0 * np.real(f.conj() @ self.omega)
        return self.alpha + quadratic + cross


@dataclass(frozen=True, eq=False)
class SurrogateSet:
    """Coefficients of the minorizer (upsilon, kappa) and majorizer (pi, kappa_tilde, c) built at one anchor."""
    anchor: np.ndarray
    upsilon: np.ndarray
    pi: np.ndarray
    kappa: float
    kappa_tilde: float
    lambda_max: float
    constant: float

    @property
    def theta(self) -> np.ndarray:
        return self.lambda_max * np.eye(self.upsilon.size)


@dataclass(frozen=True)
class DistanceCut:
    """Half-plane normal . t >= offset that inner-approximates ||t - t_v|| >= D."""
    normal: np.ndarray
    offset: float

    def slack(self, position) -> np.ndarray:
        return np.asarray(position, dtype=float) @ self.normal - self.offset

    def satisfied(self, position, tolerance: float = 0.0) -> np.ndarray:
        return self.slack(position) >= -tolerance


@dataclass(frozen=True, eq=False)
class PositionStep:
    index: int
    position: np.ndarray
    beta1: float
    beta2: float
    accepted: bool
    surrogate_beta1: Optional[float] = None
    reason: Optional[str] = None


def trace_decompose(layout: AntennaLayout, covariance: np.ndarray, n: int, link: Link,
                    realization: ChannelRealization) -> TraceDecomposition:
    beamformer = extract_rank_one(covariance)
    paths = realization.paths(link)
    responses = field_response_matrix(layout, link, realization)
    phi = outer_hermitian(paths.gains)

    others = responses @ beamformer - responses[:, n] * beamformer[n]
    weight = beamformer[n]
    return TraceDecomposition(
        link=Link(link),
        alpha=float(np.real(others.conj() @ phi @ others)),
        omega=phi @ others * np.conj(weight),
        psi=abs(weight) ** 2 * phi,
        phi=phi,
        directions=path_directions(paths.elevation, paths.azimuth),
        wavelength=realization.wavelength,
    )


def beta_bar(position, coefficients, directions, wavelength: float) -> np.ndarray:
    """2 Re{f(t)^H c} = 2 sum_l |c_l| cos(2 pi rho_l(t) / lambda - angle(c_l))."""
    coefficients = np.asarray(coefficients, dtype=complex)
    phase = 2.0 * np.pi / wavelength * (np.asarray(position, dtype=float) @ np.asarray(directions).T)
    return 2.0 * np.sum(np.abs(coefficients) * np.cos(phase - np.angle(coefficients)), axis=-1)


def grad_beta_bar(position, coefficients, directions, wavelength: float) -> np.ndarray:
    coefficients = np.asarray(coefficients, dtype=complex)
    directions = np.asarray(directions, dtype=float)
    chi = 2.0 * np.pi / wavelength * (directions @ np.asarray(position, dtype=float)) - np.angle(coefficients)
    weights = np.abs(coefficients) * np.sin(chi)
    return -4.0 * np.pi / wavelength * (weights @ directions)


def _curvature(coefficients: np.ndarray, wavelength: float) -> float:
    return float(16.0 * np.pi ** 2 / wavelength ** 2 * np.sum(np.abs(coefficients)))


def build_surrogates(decomposition: TraceDecomposition, anchor) -> SurrogateSet:
    anchor = np.asarray(anchor, dtype=float)
    f_anchor = decomposition.field_response(anchor)
    psi = decomposition.psi
    lambda_max = float(max(np.linalg.eigvalsh(psi)[-1], 0.0))
    upsilon = psi @ f_anchor + decomposition.omega
    pi = decomposition.omega - (lambda_max * f_anchor - psi @ f_anchor)
    anchored = float(np.real(f_anchor.conj() @ psi @ f_anchor))
    return SurrogateSet(
        anchor=anchor,
        upsilon=upsilon,
        pi=pi,
        kappa=_curvature(upsilon, decomposition.wavelength),
        kappa_tilde=_curvature(pi, decomposition.wavelength),
        lambda_max=lambda_max,
        constant=2.0 * lambda_max * f_anchor.size - anchored,
    )


def _lower_terms(decomposition: TraceDecomposition, surrogates: SurrogateSet, anchor) -> Tuple[float, np.ndarray, float]:
    """(value at anchor, gradient, curvature) of the concave minorizer."""
    f_anchor = decomposition.field_response(anchor)
    anchored = float(np.real(f_anchor.conj() @ decomposition.psi @ f_anchor))
    args = (surrogates.upsilon, decomposition.directions, decomposition.wavelength)
    value = decomposition.alpha - anchored + float(beta_bar(anchor, *args))
    return value, grad_beta_bar(anchor, *args), surrogates.kappa


def _upper_terms(decomposition: TraceDecomposition, surrogates: SurrogateSet, anchor) -> Tuple[float, np.ndarray, float]:
    """(value at anchor, gradient, curvature) of the convex majorizer."""
    args = (surrogates.pi, decomposition.directions, decomposition.wavelength)
    value = decomposition.alpha + surrogates.constant + float(beta_bar(anchor, *args))
    return value, grad_beta_bar(anchor, *args), surrogates.kappa_tilde


def lower_bound_trace(position, decomposition: TraceDecomposition, surrogates: SurrogateSet, anchor) -> np.ndarray:
    """Global concave lower bound of Tr(H_k V) in antenna n's position."""
    value, gradient, curvature = _lower_terms(decomposition, surrogates, anchor)
    step = np.asarray(position, dtype=float) - np.asarray(anchor, dtype=float)
    return value + step @ gradient - 0.5 * curvature * np.sum(step ** 2, axis=-1)


def upper_bound_trace(position, decomposition: TraceDecomposition, surrogates: SurrogateSet, anchor) -> np.ndarray:
    """Global convex upper bound of Tr(H_k V); built for Eve's and Willie's links."""
    if decomposition.link == Link.BOB:
        raise ValueError("Upper bounds are built for the eve and willie links only")
    value, gradient, curvature = _upper_terms(decomposition, surrogates, anchor)
    step = np.asarray(position, dtype=float) - np.asarray(anchor, dtype=float)
    return value + step @ gradient + 0.5 * curvature * np.sum(step ** 2, axis=-1)


def min_distance_linearization(other, anchor, min_spacing: float) -> DistanceCut:
    other = np.asarray(other, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    distance = float(np.linalg.norm(anchor - other))
    if distance == 0.0:
        raise DegenerateGeometryError(f"Antenna anchor coincides with another antenna at {anchor.tolist()}")
    normal = (anchor - other) / distance
    return DistanceCut(normal=normal, offset=float(min_spacing + normal @ other))


def _objective(traces: Dict[Link, float], noise_power: float) -> float:
    return (noise_power + traces[Link.BOB]) / (noise_power + traces[Link.EVE])


def solve_position_subproblem(n: int, layout: AntennaLayout, covariance: np.ndarray,
                              realization: ChannelRealization, budget: CovertBudget,
                              config: ScenarioConfig,
                              beta_anchors: Optional[Tuple[float, float]] = None) -> PositionStep:
    """
    Move antenna n to the maximizer of the surrogate problem.

    The candidate is checked against the true region, spacing and covert
    constraints and the true objective; a candidate that fails any of them
    is rejected and the anchor returned.
    """
    noise = config.sigma2
    anchor = layout.position(n)
    traces = true_traces(layout, covariance, realization)
    if beta_anchors is None:
        beta2_anchor = noise + traces[Link.EVE]
        beta_anchors = ((noise + traces[Link.BOB]) / beta2_anchor, beta2_anchor)
    beta1_anchor, beta2_anchor = beta_anchors

    def keep(reason: str, surrogate: Optional[float] = None) -> PositionStep:
        logger.debug("antenna %d stays at %s: %s", n, anchor.tolist(), reason)
        return PositionStep(n, anchor, beta1_anchor, beta2_anchor, accepted=False,
                            surrogate_beta1=surrogate, reason=reason)

    if extract_rank_one(covariance)[n] == 0:
        return keep("zero beamforming weight")
    # Willie sits in a null; the majorized cap admits only the anchor itself.
    if budget.power_cap == 0.0:
        return keep("zero covert cap")

    terms = {}
    for link in Link:
        decomposition = trace_decompose(layout, covariance, n, link, realization)
        surrogates = build_surrogates(decomposition, anchor)
        build = _lower_terms if link == Link.BOB else _upper_terms
        terms[link] = build(decomposition, surrogates, anchor)

    wavelength = config.wavelength
    displacement = cp.Variable(2)
    beta1 = cp.Variable()
    beta2 = cp.Variable()
    position = anchor + wavelength * displacement
    spread = cp.sum_squares(displacement)

    def bound(link: Link, sign: float):
        value, gradient, curvature = terms[link]
        return (value + wavelength * gradient @ displacement
                + sign * 0.5 * curvature * wavelength ** 2 * spread) / noise

    half = np.maximum(config.region_side / 2.0, np.abs(anchor))
    willie_cap = max(budget.normalized_cap, terms[Link.WILLIE][0] / noise)
    constraints = [
        cp.abs(position) <= half,
        bound(Link.WILLIE, 1.0) <= willie_cap,
        beta2 >= 1.0 + bound(Link.EVE, 1.0),
        1.0 + bound(Link.BOB, -1.0)
        >= beta_product_surrogate(beta1, beta2, beta1_anchor, beta2_anchor / noise),
        beta1 >= BETA_FLOOR,
        beta2 >= BETA_FLOOR,
    ]
    for other in range(layout.size):
        if other == n:
            continue
        cut = min_distance_linearization(layout.position(other), anchor, config.min_spacing)
        constraints.append(cut.normal @ position >= min(cut.offset, float(cut.normal @ anchor)))

    solve_problem(cp.Problem(cp.Maximize(beta1), constraints), config.cvx_solver,
                  f"position subproblem for antenna {n}")
    surrogate_beta1 = float(beta1.value)
    candidate_position = anchor + wavelength * np.asarray(displacement.value, dtype=float)
    candidate = layout.with_position(n, candidate_position)

    if not candidate.is_feasible(config.region_side, config.min_spacing):
        return keep("; ".join(candidate.violations(config.region_side, config.min_spacing)), surrogate_beta1)
    moved = true_traces(candidate, covariance, realization)
    if not within_cap(moved[Link.WILLIE], budget, config.feasibility_tolerance):
        return keep("covert cap violated", surrogate_beta1)
    before = _objective(traces, noise)
    after = _objective(moved, noise)
    if after < before * (1.0 - 1e-12):
        return keep(f"objective would drop from {before:.9g} to {after:.9g}", surrogate_beta1)

    new_beta2 = noise + moved[Link.EVE]
    return PositionStep(
        index=n,
        position=candidate_position,
        beta1=(noise + moved[Link.BOB]) / new_beta2,
        beta2=new_beta2,
        accepted=True,
        surrogate_beta1=surrogate_beta1,
    )
