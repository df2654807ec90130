import numpy as np
import pytest

from src.channel.channel_model import channel_vector, layout_channels, received_power, sample_realization, true_traces
from src.channel.layout import AntennaLayout
from src.covertness.detectability import covert_budget, within_cap
from src.errors import DegenerateGeometryError
from src.models.enums import Link
from src.models.schemas import ScenarioConfig
from src.optimization.ao_driver import init_layout
from src.optimization import positions
from src.optimization.beamforming import BeamformingProblem, solve_beamforming
from src.optimization.positions import (
    beta_bar,
    build_surrogates,
    grad_beta_bar,
    lower_bound_trace,
    min_distance_linearization,
    solve_position_subproblem,
    trace_decompose,
    upper_bound_trace,
)
from tests.data.sample_scenario import bob_only_realization, random_beamformer, unit_realization


WAVELENGTH = 0.125


def rank_one(v):
    return np.outer(v, v.conj())


def unit_instance(seed, n_antennas=4):
    config = ScenarioConfig(n_antennas=n_antennas, sigma2=1.0)
    realization = unit_realization(config, seed)
    layout = init_layout(config, seed)
    v = random_beamformer(np.random.default_rng(seed), n_antennas)
    return config, realization, layout, rank_one(v)


def sample_region(rng, config, count=10_000):
    half = config.region_side / 2.0
    return rng.uniform(-half, half, (count, 2))


def test_single_antenna_has_no_cross_terms():
    config = ScenarioConfig(sigma2=1.0)
    realization = unit_realization(config, 4)
    layout = AntennaLayout([[0.01, -0.02]])
    covariance = np.array([[2.0]])
    for link in Link:
        decomposition = trace_decompose(layout, covariance, 0, link, realization)
        assert decomposition.alpha == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(decomposition.omega, 0.0, atol=1e-15)
        direct = received_power(channel_vector(layout, link, realization), covariance)
        assert decomposition.trace(layout.position(0)) == pytest.approx(direct, rel=1e-12)


def test_zero_weight_antenna_does_not_matter():
    config, realization, layout, _ = unit_instance(5)
    v = random_beamformer(np.random.default_rng(5), 4)
    v[2] = 0.0
    decomposition = trace_decompose(layout, rank_one(v), 2, Link.BOB, realization)
    np.testing.assert_allclose(decomposition.psi, 0.0, atol=1e-12)
    np.testing.assert_allclose(decomposition.omega, 0.0, atol=1e-12)
    for position in ([0.0, 0.0], [0.2, -0.1]):
        assert decomposition.trace(position) == pytest.approx(decomposition.alpha, rel=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_decomposition_reproduces_the_trace(seed):
    config, realization, layout, covariance = unit_instance(seed)
    for link in Link:
        direct = received_power(channel_vector(layout, link, realization), covariance)
        for n in range(layout.size):
            decomposition = trace_decompose(layout, covariance, n, link, realization)
            assert decomposition.trace(layout.position(n)) == pytest.approx(direct, rel=1e-9)


def test_decomposition_follows_a_moved_antenna():
    config, realization, layout, covariance = unit_instance(8)
    decomposition = trace_decompose(layout, covariance, 1, Link.EVE, realization)
    target = [0.05, 0.2]
    moved = layout.with_position(1, target)
    direct = received_power(channel_vector(moved, Link.EVE, realization), covariance)
    assert decomposition.trace(target) == pytest.approx(direct, rel=1e-9)


def test_gradient_vanishes_at_stationary_phase():
    rng = np.random.default_rng(0)
    directions = rng.uniform(-1.0, 1.0, (4, 2))
    position = np.array([0.03, -0.07])
    phase = 2.0 * np.pi / WAVELENGTH * (directions @ position)
    coefficients = rng.uniform(0.5, 2.0, 4) * np.exp(1j * phase)
    np.testing.assert_allclose(grad_beta_bar(position, coefficients, directions, WAVELENGTH), 0.0, atol=1e-9)
    np.testing.assert_allclose(grad_beta_bar(position, np.zeros(4), directions, WAVELENGTH), 0.0)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(1)
    step = 1e-6
    for _ in range(100):
        elevation = rng.uniform(0.0, np.pi, 4)
        azimuth = rng.uniform(0.0, np.pi, 4)
        directions = np.stack([np.sin(elevation) * np.cos(azimuth), np.cos(elevation)], axis=1)
        coefficients = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        position = rng.uniform(-0.25, 0.25, 2)

        gradient = grad_beta_bar(position, coefficients, directions, WAVELENGTH)
        numeric = np.array([
            (beta_bar(position + step * e, coefficients, directions, WAVELENGTH)
             - beta_bar(position - step * e, coefficients, directions, WAVELENGTH)) / (2.0 * step)
            for e in np.eye(2)
        ])
        scale = 4.0 * np.pi / WAVELENGTH * np.sum(np.abs(coefficients))
        assert np.linalg.norm(numeric - gradient) <= 1e-5 * scale


@pytest.mark.parametrize("seed", range(4))
def test_lower_bound_minorizes_bob(seed):
    config, realization, layout, covariance = unit_instance(seed)
    rng = np.random.default_rng(100 + seed)
    points = sample_region(rng, config)
    for n in range(layout.size):
        anchor = layout.position(n)
        decomposition = trace_decompose(layout, covariance, n, Link.BOB, realization)
        surrogates = build_surrogates(decomposition, anchor)
        exact = decomposition.trace(anchor)
        assert lower_bound_trace(anchor, decomposition, surrogates, anchor) == pytest.approx(exact, rel=1e-9)
        gap = decomposition.trace(points) - lower_bound_trace(points, decomposition, surrogates, anchor)
        assert gap.min() >= -1e-8


@pytest.mark.parametrize("seed", range(4))
def test_upper_bound_majorizes_eve_and_willie(seed):
    config, realization, layout, covariance = unit_instance(seed)
    rng = np.random.default_rng(200 + seed)
    points = sample_region(rng, config)
    for link in (Link.EVE, Link.WILLIE):
        for n in range(layout.size):
            anchor = layout.position(n)
            decomposition = trace_decompose(layout, covariance, n, link, realization)
            surrogates = build_surrogates(decomposition, anchor)
            exact = decomposition.trace(anchor)
            assert upper_bound_trace(anchor, decomposition, surrogates, anchor) == pytest.approx(exact, rel=1e-9)
            gap = upper_bound_trace(points, decomposition, surrogates, anchor) - decomposition.trace(points)
            assert gap.min() >= -1e-8


def test_silent_surrogate_is_constant():
    config, realization, layout, _ = unit_instance(6)
    v = random_beamformer(np.random.default_rng(6), 4)
    v[0] = 0.0
    decomposition = trace_decompose(layout, rank_one(v), 0, Link.BOB, realization)
    anchor = layout.position(0)
    surrogates = build_surrogates(decomposition, anchor)
    np.testing.assert_allclose(surrogates.upsilon, 0.0, atol=1e-12)
    values = lower_bound_trace(np.array([[0.1, 0.1], [-0.2, 0.05]]), decomposition, surrogates, anchor)
    np.testing.assert_allclose(values, decomposition.alpha)


def test_single_path_majorizer_needs_no_eigenvalue_correction():
    config = ScenarioConfig(n_paths=1, sigma2=1.0)
    realization = unit_realization(config, 2)
    layout = init_layout(config, 2)
    covariance = rank_one(random_beamformer(np.random.default_rng(2), 4))
    anchor = layout.position(3)
    decomposition = trace_decompose(layout, covariance, 3, Link.WILLIE, realization)
    surrogates = build_surrogates(decomposition, anchor)
    np.testing.assert_allclose(surrogates.theta - decomposition.psi, 0.0, atol=1e-12)
    np.testing.assert_allclose(surrogates.pi, decomposition.omega, atol=1e-12)


def test_upper_bound_is_not_built_for_bob():
    config, realization, layout, covariance = unit_instance(1)
    decomposition = trace_decompose(layout, covariance, 0, Link.BOB, realization)
    surrogates = build_surrogates(decomposition, layout.position(0))
    with pytest.raises(ValueError):
        upper_bound_trace(layout.position(0), decomposition, surrogates, layout.position(0))


def test_distance_cut_is_active_at_minimum_spacing():
    spacing = WAVELENGTH / 2.0
    cut = min_distance_linearization([0.0, 0.0], [spacing, 0.0], spacing)
    assert cut.slack([spacing, 0.0]) == pytest.approx(0.0, abs=1e-15)
    assert not cut.satisfied([-0.01, 0.0])


def test_distance_cut_is_an_inner_approximation():
    rng = np.random.default_rng(3)
    spacing = WAVELENGTH / 2.0
    for _ in range(20):
        other, anchor = rng.uniform(-0.25, 0.25, (2, 2))
        cut = min_distance_linearization(other, anchor, spacing)
        points = rng.uniform(-0.5, 0.5, (5000, 2))
        inside = points[cut.satisfied(points)]
        assert np.all(np.linalg.norm(inside - other, axis=1) >= spacing - 1e-12)


def test_coincident_antennas_have_no_cut():
    with pytest.raises(DegenerateGeometryError):
        min_distance_linearization([0.1, 0.1], [0.1, 0.1], 0.0625)


def test_optimal_anchor_is_a_fixed_point():
    config = ScenarioConfig(sigma2=1.0)
    realization = bob_only_realization(WAVELENGTH, elevation=1.1, azimuth=0.4)
    layout = AntennaLayout([[0.02, -0.03]])
    budget = covert_budget(config.epsilon, config.sigma2)
    step = solve_position_subproblem(0, layout, np.array([[1.0]]), realization, budget, config)
    np.testing.assert_allclose(step.position, layout.position(0), atol=1e-4)
    assert step.beta1 == pytest.approx(2.0, rel=1e-9)


def test_two_antenna_step_matches_grid_search():
    config = ScenarioConfig(n_antennas=2, sigma2=1.0)
    realization = bob_only_realization(WAVELENGTH)
    layout = AntennaLayout([[0.0, 0.0], [0.0, -WAVELENGTH]])
    v = np.array([1.0, np.exp(1j * 0.7)]) / np.sqrt(2.0)
    covariance = rank_one(v)
    budget = covert_budget(config.epsilon, config.sigma2)

    step = solve_position_subproblem(0, layout, covariance, realization, budget, config)

    anchor = layout.position(0)
    decomposition = trace_decompose(layout, covariance, 0, Link.BOB, realization)
    surrogates = build_surrogates(decomposition, anchor)
    half = config.region_side / 2.0
    axis = np.linspace(-half, half, 1001)
    grid = np.stack(np.meshgrid(axis, axis), axis=-1).reshape(-1, 2)
    cut = min_distance_linearization(layout.position(1), anchor, config.min_spacing)
    grid = grid[cut.satisfied(grid)]
    best = grid[np.argmax(lower_bound_trace(grid, decomposition, surrogates, anchor))]

    assert step.accepted
    np.testing.assert_allclose(step.position, best, atol=1e-3)
    assert not np.allclose(step.position, anchor, atol=1e-4)
    assert step.beta1 >= (1.0 + decomposition.trace(anchor)) * (1.0 - 1e-12)


def sweep_never_loses(config, seed):
    realization = sample_realization(config, seed)
    layout = init_layout(config, seed)
    budget = covert_budget(config.epsilon, config.sigma2)
    problem = BeamformingProblem.from_channels(layout_channels(layout, realization), config, budget)
    v = solve_beamforming(problem).beamformer
    covariance = rank_one(v)

    def objective(current):
        traces = true_traces(current, covariance, realization)
        return (config.sigma2 + traces[Link.BOB]) / (config.sigma2 + traces[Link.EVE])

    before = objective(layout)
    for n in range(layout.size):
        step = solve_position_subproblem(n, layout, covariance, realization, budget, config)
        if step.accepted:
            layout = layout.with_position(n, step.position)
        after = objective(layout)
        assert after >= before * (1.0 - 1e-8)
        before = after
        assert layout.is_feasible(config.region_side, config.min_spacing)
        assert within_cap(true_traces(layout, covariance, realization)[Link.WILLIE], budget)


def test_one_sweep_on_default_scenario_never_loses(default_config):
    sweep_never_loses(default_config, 3)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(50))
def test_one_sweep_never_loses_on_many_instances(default_config, seed):
    sweep_never_loses(default_config, seed)


def test_zero_cap_keeps_every_antenna_in_place(monkeypatch):
    config = ScenarioConfig(epsilon=0.0)
    realization = sample_realization(config, 0)
    layout = init_layout(config, 0)
    budget = covert_budget(0.0, config.sigma2)
    problem = BeamformingProblem.from_channels(layout_channels(layout, realization), config, budget)
    covariance = rank_one(solve_beamforming(problem).beamformer)

    def unreachable(*args, **kwargs):
        raise AssertionError("no convex solve expected")

    monkeypatch.setattr(positions, "solve_problem", unreachable)
    for n in range(layout.size):
        step = solve_position_subproblem(n, layout, covariance, realization, budget, config)
        assert not step.accepted
        np.testing.assert_array_equal(step.position, layout.position(n))
