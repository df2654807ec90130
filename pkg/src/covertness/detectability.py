"""
Willie's detectability of Alice's transmission.

Under H0 Willie observes CN(0, delta0) with delta0 = sigma^2, under H1
CN(0, delta1) with delta1 = sigma^2 + Tr(H_w V). Covertness requires
D(p0 || p1) <= 2 eps^2, which on the a = delta1/delta0 > 1 branch is the
linear cap Tr(H_w V) <= sigma^2 (a2 - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.channel.channel_model import received_power
from src.errors import DomainError, InvalidInputError
from src.models.enums import LambertBranch
from src.numerics.lambert import lambert_w


@dataclass(frozen=True)
class CovertBudget:
    """Roots a1 <= 1 <= a2 of ln a + 1/a = 1 + 2 eps^2 and the resulting power cap."""
    epsilon: float
    a1: float
    a2: float
    noise_power: float
    power_cap: float

    @property
    def normalized_cap(self) -> float:
        """Cap in units of the noise power, a2 - 1."""
        return self.a2 - 1.0


@dataclass(frozen=True)
class CovertnessReport:
    willie_power: float
    power_cap: float
    slack: float
    kl_divergence: float
    dep_lower_bound: float
    feasible: bool


def _check_variances(delta0: float, delta1: float) -> None:
    if not (delta0 > 0 and delta1 > 0) or not (math.isfinite(delta0) and math.isfinite(delta1)):
        raise DomainError(f"Likelihood variances must be positive and finite, got {delta0}, {delta1}")


def kl_divergence(delta0: float, delta1: float) -> float:
    """D(p0 || p1) in nats between CN(0, delta0) and CN(0, delta1)."""
    _check_variances(delta0, delta1)
    ratio = delta0 / delta1
    # log1p keeps precision when the variances are close.
    return float(-math.log1p(ratio - 1.0) + (ratio - 1.0))


def dep_lower_bound(delta0: float, delta1: float) -> float:
    """Pinsker bound 1 - sqrt(D/2) on Willie's detection error probability, clamped to [0, 1]."""
    bound = 1.0 - math.sqrt(kl_divergence(delta0, delta1) / 2.0)
    return min(max(bound, 0.0), 1.0)


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"Detection coefficient must lie in [0, 1], got {epsilon}")
    return epsilon


def covert_roots(epsilon: float) -> Tuple[float, float]:
    """Both roots of ln a + 1/a = 1 + 2 eps^2 via the two real Lambert W branches."""
    epsilon = _check_epsilon(epsilon)
    if epsilon == 0.0:
        return 1.0, 1.0
    level = 1.0 + 2.0 * epsilon * epsilon
    z = -math.exp(-level)
    a1 = math.exp(lambert_w(LambertBranch.MINUS_ONE, z) + level)
    a2 = math.exp(lambert_w(LambertBranch.PRINCIPAL, z) + level)
    return min(a1, 1.0), max(a2, 1.0)


def covert_power_cap(epsilon: float, noise_power: float) -> float:
    if noise_power <= 0:
        raise DomainError("Noise power must be positive")
    _, a2 = covert_roots(epsilon)
    return noise_power * (a2 - 1.0)


def covert_budget(epsilon: float, noise_power: float) -> CovertBudget:
    a1, a2 = covert_roots(epsilon)
    return CovertBudget(
        epsilon=float(epsilon),
        a1=a1,
        a2=a2,
        noise_power=float(noise_power),
        power_cap=covert_power_cap(epsilon, noise_power),
    )


def within_cap(willie_power: float, budget: CovertBudget, tolerance: float = 1e-8) -> bool:
    """Cap check in noise-normalized units: (cap - Tr(H_w V)) / sigma^2 >= -tolerance."""
    return (budget.power_cap - willie_power) / budget.noise_power >= -tolerance


def verify_covertness(willie_channel: np.ndarray, covariance: np.ndarray, budget: CovertBudget,
                      tolerance: float = 1e-8) -> CovertnessReport:
    """Evaluate the covert constraint and Willie's detection statistics at an operating point."""
    if budget.noise_power <= 0:
        raise InvalidInputError("Budget noise power must be positive")
    power = received_power(willie_channel, covariance)
    delta0 = budget.noise_power
    delta1 = budget.noise_power + power
    return CovertnessReport(
        willie_power=power,
        power_cap=budget.power_cap,
        slack=budget.power_cap - power,
        kl_divergence=kl_divergence(delta0, delta1),
        dep_lower_bound=dep_lower_bound(delta0, delta1),
        feasible=within_cap(power, budget, tolerance),
    )
