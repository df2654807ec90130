"""
Random-position array baseline (RPA)
"""

from __future__ import annotations

from src.models.enums import SchemeName
from src.optimization.ao_driver import run_rpa
from src.schemes.base_scheme import BaseScheme
from src.schemes.registry import register_scheme


@register_scheme
class RandomPositionScheme(BaseScheme):
    scheme = SchemeName.RPA
    description = "One random layout meeting the spacing constraint; beamforming only"

    @classmethod
    def run(cls, config, realization, seed):
        return run_rpa(config, realization, seed)
