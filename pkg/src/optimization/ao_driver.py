"""
Alternating optimization over the beamformer block and the N position blocks,
plus the fixed-layout baselines (FPA, RPA, EAS) that share the beamforming solver.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from src.channel.channel_model import ChannelRealization, layout_channels, true_traces
from src.channel.layout import AntennaLayout
from src.covertness.detectability import CovertBudget, CovertnessReport, covert_budget, verify_covertness
from src.errors import ConfigurationError, SolverError
from src.models.enums import Link
from src.models.schemas import ScenarioConfig
from src.optimization.beamforming import BeamformingProblem, solve_beamforming
from src.optimization.positions import solve_position_subproblem


logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


@dataclass(eq=False)
class AOState:
    round: int
    layout: AntennaLayout
    covariance: np.ndarray
    beamformer: np.ndarray
    beta1: float
    beta2: float
    history: List[float] = field(default_factory=list)
    block_timing: Dict[str, float] = field(default_factory=lambda: {"beamforming": 0.0, "positions": 0.0})

    @property
    def objective(self) -> float:
        return self.history[-1]


@dataclass(frozen=True, eq=False)
class AOSolution:
    state: AOState
    secrecy_rate_raw: float
    secrecy_rate: float
    covertness: CovertnessReport
    converged: bool
    rounds: int

    @property
    def objective(self) -> float:
        return self.state.objective

    @property
    def layout(self) -> AntennaLayout:
        return self.state.layout


def init_layout(config: ScenarioConfig, seed: SeedLike) -> AntennaLayout:
    """Centered square grid with spacing max(D, A / ceil(sqrt(N))), jittered by at most D/10."""
    count = config.n_antennas
    side = math.ceil(math.sqrt(count))
    spacing = max(config.min_spacing, config.region_side / side)
    if (side - 1) * spacing > config.region_side + 1e-12:
        raise ConfigurationError(
            f"{count} antennas do not fit a {config.region_side:g} m region at spacing {config.min_spacing:g} m"
        )

    offsets = (np.arange(side) - (side - 1) / 2.0) * spacing
    grid = np.array([(x, y) for y in offsets for x in offsets])[:count]

    # Jitter stays below half the spacing surplus, so the spacing constraint survives.
    radius = min(config.min_spacing / 10.0, (spacing - config.min_spacing) / 2.0)
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, count)
    radii = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    jittered = grid + np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)

    half = config.region_side / 2.0
    return AntennaLayout(np.clip(jittered, -half, half))


def fpa_layout(config: ScenarioConfig) -> AntennaLayout:
    """N antennas on a centered line along x at spacing lambda/2."""
    spacing = config.wavelength / 2.0
    x = (np.arange(config.n_antennas) - (config.n_antennas - 1) / 2.0) * spacing
    layout = AntennaLayout(np.stack([x, np.zeros_like(x)], axis=1))
    if not layout.is_feasible(config.region_side, config.min_spacing):
        raise ConfigurationError("The lambda/2-spaced array does not satisfy the region and spacing constraints")
    return layout


def rpa_layout(config: ScenarioConfig, seed: SeedLike) -> AntennaLayout:
    """Uniform draws inside the region, rejecting any point closer than D to an accepted one."""
    rng = np.random.default_rng(seed)
    half = config.region_side / 2.0
    accepted: List[np.ndarray] = []
    for _ in range(config.rpa_max_attempts):
        point = rng.uniform(-half, half, 2)
        if all(np.linalg.norm(point - other) >= config.min_spacing for other in accepted):
            accepted.append(point)
            if len(accepted) == config.n_antennas:
                return AntennaLayout(np.array(accepted))
    raise ConfigurationError(
        f"Random placement found only {len(accepted)} of {config.n_antennas} antennas "
        f"after {config.rpa_max_attempts} attempts"
    )


def eas_candidates(config: ScenarioConfig) -> np.ndarray:
    """2N fixed positions: two lambda/2-spaced rows of N at y = -lambda/4 and +lambda/4."""
    quarter = config.wavelength / 4.0
    x = (np.arange(config.n_antennas) - (config.n_antennas - 1) / 2.0) * 2.0 * quarter
    rows = [np.stack([x, np.full_like(x, y)], axis=1) for y in (-quarter, quarter)]
    return np.concatenate(rows)


def _objective(traces: Dict[Link, float], noise_power: float) -> float:
    return (noise_power + traces[Link.BOB]) / (noise_power + traces[Link.EVE])


def _beamform(config: ScenarioConfig, realization: ChannelRealization, layout: AntennaLayout,
              budget: CovertBudget, warm_start: Optional[np.ndarray] = None):
    """Solve the beamforming block; returns (rank-one covariance, beamformer, traces)."""
    problem = BeamformingProblem.from_channels(
        layout_channels(layout, realization), config, budget, initial_covariance=warm_start,
    )
    solution = solve_beamforming(problem)
    covariance = np.outer(solution.beamformer, solution.beamformer.conj())
    return covariance, solution.beamformer, true_traces(layout, covariance, realization)


def _state_from(layout, covariance, beamformer, traces, noise_power, round_=0) -> AOState:
    beta2 = noise_power + traces[Link.EVE]
    return AOState(
        round=round_,
        layout=layout,
        covariance=covariance,
        beamformer=beamformer,
        beta1=(noise_power + traces[Link.BOB]) / beta2,
        beta2=beta2,
        history=[_objective(traces, noise_power)],
    )


def _with_context(exc: SolverError, round_: int, block: str) -> SolverError:
    return type(exc)(f"round {round_}, block {block}: {exc}", residuals=exc.residuals)


def _finish(config: ScenarioConfig, realization: ChannelRealization, budget: CovertBudget,
            state: AOState, converged: bool) -> AOSolution:
    willie = layout_channels(state.layout, realization)[Link.WILLIE]
    raw = math.log2(state.objective)
    return AOSolution(
        state=state,
        secrecy_rate_raw=raw,
        secrecy_rate=max(raw, 0.0),
        covertness=verify_covertness(willie, state.covariance, budget, config.feasibility_tolerance),
        converged=converged,
        rounds=state.round,
    )


def _fixed_layout(config: ScenarioConfig, realization: ChannelRealization, layout: AntennaLayout,
                  budget: CovertBudget) -> AOSolution:
    started = time.perf_counter()
    try:
        covariance, beamformer, traces = _beamform(config, realization, layout, budget)
    except SolverError as exc:
        raise _with_context(exc, 0, "beamforming") from exc
    state = _state_from(layout, covariance, beamformer, traces, config.sigma2)
    state.block_timing["beamforming"] += time.perf_counter() - started
    return _finish(config, realization, budget, state, converged=True)


def _run_single(config: ScenarioConfig, realization: ChannelRealization, layout: AntennaLayout,
                budget: CovertBudget) -> AOSolution:
    noise = config.sigma2
    started = time.perf_counter()
    try:
        covariance, beamformer, traces = _beamform(config, realization, layout, budget)
    except SolverError as exc:
        raise _with_context(exc, 0, "beamforming") from exc
    state = _state_from(layout, covariance, beamformer, traces, noise)
    state.block_timing["beamforming"] += time.perf_counter() - started

    converged = False
    for round_ in range(1, config.max_rounds + 1):
        previous = state.objective

        started = time.perf_counter()
        for n in range(state.layout.size):
            try:
                step = solve_position_subproblem(n, state.layout, state.covariance, realization, budget, config)
            except SolverError as exc:
                raise _with_context(exc, round_, f"position {n}") from exc
            if step.accepted:
                state.layout = state.layout.with_position(n, step.position)
                state.beta1, state.beta2 = step.beta1, step.beta2
        state.block_timing["positions"] += time.perf_counter() - started

        started = time.perf_counter()
        try:
            covariance, beamformer, traces = _beamform(config, realization, state.layout, budget,
                                                      warm_start=state.covariance)
        except SolverError as exc:
            raise _with_context(exc, round_, "beamforming") from exc
        state.block_timing["beamforming"] += time.perf_counter() - started

        current = _objective(true_traces(state.layout, state.covariance, realization), noise)
        candidate = _objective(traces, noise)
        if candidate >= current:
            state.covariance, state.beamformer = covariance, beamformer
            beta2 = noise + traces[Link.EVE]
            state.beta1, state.beta2 = (noise + traces[Link.BOB]) / beta2, beta2
            current = candidate
        else:
            logger.debug("round %d: beamformer update rejected (%.9g < %.9g)", round_, candidate, current)

        state.round = round_
        state.history.append(current)
        logger.debug("round %d: objective %.9g", round_, current)
        if abs(current - previous) <= config.ao_tolerance * abs(previous):
            converged = True
            break

    return _finish(config, realization, budget, state, converged)


def run_ao(config: ScenarioConfig, realization: ChannelRealization, seed: SeedLike) -> AOSolution:
    """Proposed scheme: AO from a seeded grid layout, best of `ao_starts` starts."""
    budget = covert_budget(config.epsilon, config.sigma2)
    best: Optional[AOSolution] = None
    for start in range(config.ao_starts):
        solution = _run_single(config, realization, init_layout(config, _start_seed(seed, start)), budget)
        logger.debug("AO start %d: objective %.9g after %d rounds", start, solution.objective, solution.rounds)
        if best is None or solution.objective > best.objective:
            best = solution
    return best


def _start_seed(seed: SeedLike, start: int) -> SeedLike:
    """Start 0 uses *seed* itself; later starts get independent children of it."""
    if start == 0:
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + (start,))
    return np.random.SeedSequence(seed, spawn_key=(start,))


def run_fpa(config: ScenarioConfig, realization: ChannelRealization) -> AOSolution:
    budget = covert_budget(config.epsilon, config.sigma2)
    return _fixed_layout(config, realization, fpa_layout(config), budget)


def run_rpa(config: ScenarioConfig, realization: ChannelRealization, seed: SeedLike) -> AOSolution:
    budget = covert_budget(config.epsilon, config.sigma2)
    return _fixed_layout(config, realization, rpa_layout(config, seed), budget)


def run_eas(config: ScenarioConfig, realization: ChannelRealization) -> AOSolution:
    """Best N-subset of the 2N candidate positions; ties keep the first subset in enumeration order."""
    if config.n_antennas > config.eas_max_antennas:
        raise ConfigurationError(
            f"Exhaustive search is capped at {config.eas_max_antennas} antennas, got {config.n_antennas}"
        )
    budget = covert_budget(config.epsilon, config.sigma2)
    candidates = eas_candidates(config)
    best: Optional[AOSolution] = None
    evaluated = 0
    for subset in itertools.combinations(range(candidates.shape[0]), config.n_antennas):
        layout = AntennaLayout(candidates[list(subset)])
        if not layout.is_feasible(config.region_side, config.min_spacing):
            continue
        solution = _fixed_layout(config, realization, layout, budget)
        evaluated += 1
        if best is None or solution.objective > best.objective:
            best = solution
    if best is None:
        raise ConfigurationError("No candidate subset satisfies the region and spacing constraints")
    logger.debug("EAS evaluated %d subsets, best objective %.9g", evaluated, best.objective)
    return best
