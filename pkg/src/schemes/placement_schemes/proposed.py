"""
Proposed scheme: jointly optimized antenna positions and beamformer
"""

from __future__ import annotations

from src.models.enums import SchemeName
from src.optimization.ao_driver import run_ao
from src.schemes.base_scheme import BaseScheme
from src.schemes.registry import register_scheme


@register_scheme
class ProposedScheme(BaseScheme):
    scheme = SchemeName.PROPOSED
    description = "Alternating optimization of the beamformer and every antenna position"

    @classmethod
    def run(cls, config, realization, seed):
        return run_ao(config, realization, seed)
