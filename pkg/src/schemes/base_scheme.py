from __future__ import annotations

"""
Abstract base class for antenna placement schemes.

A scheme turns one scenario and one channel realization into an optimized
operating point (`AOSolution`). Sub-classes set `scheme` to their
`SchemeName` and implement `run`. Schemes that draw random numbers use the
seed they are handed; deterministic schemes ignore it.
"""

from abc import ABC, abstractmethod
from typing import ClassVar

from src.channel.channel_model import ChannelRealization
from src.models.enums import SchemeName
from src.models.schemas import ScenarioConfig
from src.optimization.ao_driver import AOSolution, SeedLike


class BaseScheme(ABC):
    """Abstract base class for all placement schemes."""

    scheme: ClassVar[SchemeName]

    description: ClassVar[str] = ""

    @classmethod
    @abstractmethod
    def run(cls, config: ScenarioConfig, realization: ChannelRealization, seed: SeedLike) -> AOSolution:
        raise NotImplementedError
