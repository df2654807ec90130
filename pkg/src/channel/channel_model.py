"""
Channel synthesis, SNR and secrecy rate.

Each link k has L_k paths with diagonal path responses sigma_{k,l}; with a
single receive antenna combining all paths, the row channel is
h_k^H = 1^H Sigma_k F_k(t), i.e. h_k^H[n] = sum_l sigma_{k,l} f_{k,l}(t_n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from src.channel.geometry import field_response_matrix
from src.channel.layout import AntennaLayout
from src.errors import InvalidInputError, NumericalConsistencyError
from src.models.enums import Link
from src.models.schemas import ScenarioConfig


@dataclass(frozen=True, eq=False)
class LinkPaths:
    """Angles (radians) and diagonal path responses of one link."""
    elevation: np.ndarray
    azimuth: np.ndarray
    gains: np.ndarray

    def __post_init__(self):
        elevation = np.asarray(self.elevation, dtype=float).reshape(-1)
        azimuth = np.asarray(self.azimuth, dtype=float).reshape(-1)
        gains = np.asarray(self.gains, dtype=complex).reshape(-1)
        if not (elevation.size == azimuth.size == gains.size) or elevation.size < 1:
            raise InvalidInputError("Elevation, azimuth and gains need the same, non-zero path count")
        if np.any((elevation < 0) | (elevation > np.pi)) or np.any((azimuth < 0) | (azimuth > np.pi)):
            raise InvalidInputError("Path angles must lie in [0, pi]")
        object.__setattr__(self, "elevation", elevation)
        object.__setattr__(self, "azimuth", azimuth)
        object.__setattr__(self, "gains", gains)

    @property
    def size(self) -> int:
        return self.gains.size

    def with_gains(self, gains) -> "LinkPaths":
        return LinkPaths(self.elevation, self.azimuth, gains)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """All per-trial channel randomness; reproducible from (config, seed)."""
    links: Mapping[Link, LinkPaths]
    wavelength: float
    seed: int = 0

    def paths(self, link: Link) -> LinkPaths:
        return self.links[Link(link)]

    def with_link(self, link: Link, paths: LinkPaths) -> "ChannelRealization":
        return ChannelRealization({**self.links, Link(link): paths}, self.wavelength, self.seed)


def sample_realization(config: ScenarioConfig, seed: int) -> ChannelRealization:
    """Draw angles uniform on [0, pi] and path responses CN(0, g0 d_k^-alpha / L_k)."""
    rng = np.random.default_rng(seed)
    links: Dict[Link, LinkPaths] = {}
    for link in Link:
        n_paths = config.paths_for(link)
        variance = config.g0 * config.link_distance(link) ** (-config.path_loss_exponent) / n_paths
        elevation = rng.uniform(0.0, np.pi, n_paths)
        azimuth = rng.uniform(0.0, np.pi, n_paths)
        gains = math.sqrt(variance / 2.0) * (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths))
        links[link] = LinkPaths(elevation, azimuth, gains)
    return ChannelRealization(links=links, wavelength=config.wavelength, seed=seed)


def channel_vector(layout: AntennaLayout, link: Link, realization: ChannelRealization) -> np.ndarray:
    """Row channel h_k^H (length N)."""
    return realization.paths(link).gains @ field_response_matrix(layout, link, realization)


def received_power(channel_row: np.ndarray, covariance: np.ndarray) -> float:
    """Tr(h h^H V) = h^H V h for the row h^H."""
    channel_row = np.asarray(channel_row, dtype=complex)
    value = float(np.real(channel_row @ np.asarray(covariance, dtype=complex) @ channel_row.conj()))
    scale = float(np.real(np.trace(covariance))) * float(np.vdot(channel_row, channel_row).real)
    if value < -1e-12 * (1.0 + scale):
        raise NumericalConsistencyError(f"Received power is negative ({value:.3e}); V is not PSD")
    return max(value, 0.0)


def snr(channel_row: np.ndarray, covariance: np.ndarray, noise_power: float) -> float:
    if noise_power <= 0:
        raise InvalidInputError("Noise power must be positive")
    return received_power(channel_row, covariance) / noise_power


def secrecy_rate(snr_bob: float, snr_eve: float) -> float:
    """log2(1 + gamma_b) - log2(1 + gamma_e); negative values are returned as-is."""
    if snr_bob < 0 or snr_eve < 0:
        raise InvalidInputError("SNRs must be nonnegative")
    return math.log2(1.0 + snr_bob) - math.log2(1.0 + snr_eve)


def beamformer_powers(layout: AntennaLayout, beamformer: np.ndarray, realization: ChannelRealization) -> Dict[Link, float]:
    """|h_k^H v|^2 for every link."""
    beamformer = np.asarray(beamformer, dtype=complex)
    return {
        link: float(abs(channel_vector(layout, link, realization) @ beamformer) ** 2)
        for link in Link
    }


def objective_ratio(layout: AntennaLayout, beamformer: np.ndarray, realization: ChannelRealization, noise_power: float) -> float:
    """(1 + gamma_b) / (1 + gamma_e) for the beamformer v."""
    powers = beamformer_powers(layout, beamformer, realization)
    return (noise_power + powers[Link.BOB]) / (noise_power + powers[Link.EVE])


def true_traces(layout: AntennaLayout, covariance: np.ndarray, realization: ChannelRealization) -> Dict[Link, float]:
    """Tr(H_k V) for every link at *layout*."""
    return {
        link: received_power(channel_vector(layout, link, realization), covariance)
        for link in Link
    }


def layout_channels(layout: AntennaLayout, realization: ChannelRealization) -> Dict[Link, np.ndarray]:
    return {link: channel_vector(layout, link, realization) for link in Link}
