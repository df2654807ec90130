"""Antenna layouts: N positions inside the square transmit region."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from src.errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class AntennaLayout:
    """Positions as an (N, 2) array of meters; row n is antenna n."""
    positions: np.ndarray

    def __post_init__(self):
        positions = np.array(self.positions, dtype=float, copy=True)
        if positions.ndim != 2 or positions.shape[1] != 2 or positions.shape[0] < 1:
            raise InvalidInputError(f"Layout positions must have shape (N, 2), got {positions.shape}")
        if not np.all(np.isfinite(positions)):
            raise InvalidInputError("Layout positions must be finite")
        positions.setflags(write=False)
        object.__setattr__(self, "positions", positions)

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    def position(self, n: int) -> np.ndarray:
        return self.positions[n].copy()

    def with_position(self, n: int, position) -> "AntennaLayout":
        updated = self.positions.copy()
        updated[n] = np.asarray(position, dtype=float)
        return AntennaLayout(updated)

    def pairwise_distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)

    def min_pairwise_distance(self) -> float:
        if self.size < 2:
            return float("inf")
        distances = self.pairwise_distances()
        return float(distances[np.triu_indices(self.size, k=1)].min())

    def violations(self, region_side: float, min_spacing: float, tolerance: float = 1e-9) -> List[str]:
        """Human-readable list of broken region/spacing constraints (empty when feasible)."""
        problems = []
        half = region_side / 2.0
        outside = np.flatnonzero(np.any(np.abs(self.positions) > half + tolerance, axis=1))
        for n in outside:
            problems.append(f"antenna {n} at {self.positions[n].tolist()} lies outside the region")
        if self.min_pairwise_distance() < min_spacing - tolerance:
            problems.append(
                f"minimum spacing {self.min_pairwise_distance():.6g} m is below {min_spacing:.6g} m"
            )
        return problems

    def is_feasible(self, region_side: float, min_spacing: float, tolerance: float = 1e-9) -> bool:
        return not self.violations(region_side, min_spacing, tolerance)
