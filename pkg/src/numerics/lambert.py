"""
Real branches of the Lambert W function.

scipy supplies the starting value; a few Halley steps then polish it so the
residual |w e^w - z| stays at machine precision on both branches.
"""

from __future__ import annotations

import math

from scipy.special import lambertw

from src.errors import DomainError
from src.models.enums import LambertBranch


BRANCH_POINT = -math.exp(-1.0)
_BRANCH_SLACK = 1e-15
_HALLEY_STEP_TOLERANCE = 1e-14
_HALLEY_MAX_STEPS = 8


def _check_domain(branch: LambertBranch, z: float) -> float:
    if not math.isfinite(z):
        raise DomainError(f"Lambert W argument must be finite, got {z}")
    if z < BRANCH_POINT - _BRANCH_SLACK:
        raise DomainError(f"Lambert W is not real for z = {z} < -1/e")
    if branch == LambertBranch.MINUS_ONE and z >= 0.0:
        raise DomainError(f"The -1 branch needs -1/e <= z < 0, got z = {z}")
    return max(z, BRANCH_POINT)


def lambert_w(branch: LambertBranch, z: float) -> float:
    """Solve w e^w = z on the requested real branch."""
    branch = LambertBranch(branch)
    z = _check_domain(branch, float(z))
    if z == 0.0:
        return 0.0
    if z == BRANCH_POINT:
        return -1.0

    k = 0 if branch == LambertBranch.PRINCIPAL else -1
    w = float(lambertw(z, k).real)

    for _ in range(_HALLEY_MAX_STEPS):
        # Halley's update degenerates at w = -1, where both branches meet.
        if abs(w + 1.0) < 1e-8:
            break
        ew = math.exp(w)
        residual = w * ew - z
        step = residual / (ew * (w + 1.0) - (w + 2.0) * residual / (2.0 * w + 2.0))
        w -= step
        if abs(step) <= _HALLEY_STEP_TOLERANCE * (1.0 + abs(w)):
            break

    if branch == LambertBranch.PRINCIPAL:
        return max(w, -1.0)
    return min(w, -1.0)
