"""
Exhaustive antenna selection baseline (EAS)
"""

from __future__ import annotations

from src.models.enums import SchemeName
from src.optimization.ao_driver import run_eas
from src.schemes.base_scheme import BaseScheme
from src.schemes.registry import register_scheme


@register_scheme
class AntennaSelectionScheme(BaseScheme):
    scheme = SchemeName.EAS
    description = "Best N of 2N fixed positions by exhaustive search; beamforming per subset"

    @classmethod
    def run(cls, config, realization, seed):
        return run_eas(config, realization)
