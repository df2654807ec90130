"""
Field-response model: per-path phase offsets of an antenna at position t.

rho_{k,l}(t) = x sin(theta_{k,l}) cos(phi_{k,l}) + y cos(theta_{k,l}), and the
field response of link k is exp(j 2 pi / lambda * rho_{k,l}(t)) over its paths.
"""

from __future__ import annotations

import numpy as np

from src.channel.layout import AntennaLayout
from src.models.enums import Link


def path_directions(elevation, azimuth) -> np.ndarray:
    """Unit-free (L, 2) matrix whose rows map a position to its path offsets."""
    elevation = np.asarray(elevation, dtype=float)
    azimuth = np.asarray(azimuth, dtype=float)
    return np.stack([np.sin(elevation) * np.cos(azimuth), np.cos(elevation)], axis=-1)


def path_phase_offset(position, elevation, azimuth):
    """Propagation distance difference (meters) between *position* and the origin."""
    position = np.asarray(position, dtype=float)
    return position[..., 0] * np.sin(elevation) * np.cos(azimuth) + position[..., 1] * np.cos(elevation)


def field_response_vector(position, link: Link, realization) -> np.ndarray:
    paths = realization.paths(link)
    offsets = path_directions(paths.elevation, paths.azimuth) @ np.asarray(position, dtype=float)
    return np.exp(1j * 2.0 * np.pi / realization.wavelength * offsets)


def field_response_matrix(layout: AntennaLayout, link: Link, realization) -> np.ndarray:
    """L x N matrix whose column n is the field response vector of antenna n."""
    paths = realization.paths(link)
    offsets = path_directions(paths.elevation, paths.azimuth) @ layout.positions.T
    return np.exp(1j * 2.0 * np.pi / realization.wavelength * offsets)
