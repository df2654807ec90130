"""
Fixed-position array baseline (FPA)
"""

from __future__ import annotations

from src.models.enums import SchemeName
from src.optimization.ao_driver import run_fpa
from src.schemes.base_scheme import BaseScheme
from src.schemes.registry import register_scheme


@register_scheme
class FixedPositionScheme(BaseScheme):
    scheme = SchemeName.FPA
    description = "N antennas on a centered lambda/2-spaced line; beamforming only"

    @classmethod
    def run(cls, config, realization, seed):
        return run_fpa(config, realization)
