"""
Defines the Pydantic models (schemas) for scenario configuration, experiment
specifications and the per-trial records the harness emits.

For parsing, validating, and unit-converting incoming JSON config files.
Numerical working objects (realizations, layouts, solutions) are plain
dataclasses next to the code that builds them.
"""
import math
from pathlib import Path
from typing import Annotated, Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.enums import Link, SchemeName, SweepAxis, TrialStatus
from src.models.units import db_to_linear, dbm_to_watts


PositiveFloat = Annotated[float, Field(gt=0.0, allow_inf_nan=False)]
FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]
Probability = Annotated[float, Field(ge=0.0, le=1.0)]
Seed = Annotated[int, Field(ge=0, le=2**64 - 1)]

# Unit-suffixed config keys and the SI field each one feeds.
DB_KEYS = {
    "pmax_dbm": ("pmax", dbm_to_watts),
    "sigma2_dbm": ("sigma2", dbm_to_watts),
    "g0_db": ("g0", db_to_linear),
}


class Position2D(BaseModel):
    """A point in the plane, in meters. Accepts {"x":..,"y":..} or [x, y]."""
    model_config = ConfigDict(frozen=True)

    x: FiniteFloat
    y: FiniteFloat

    @model_validator(mode='before')
    @classmethod
    def accept_pairs(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 2:
                raise ValueError("A position needs exactly two coordinates")
            return {"x": data[0], "y": data[1]}
        return data

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


class ScenarioConfig(BaseModel):
    """
    All physical and algorithmic parameters of one scenario, in SI units.

    Defaults reproduce the simulation setup: 2.4 GHz carrier, a 4λ x 4λ
    transmit region, λ/2 minimum spacing, four paths per link, -40 dB
    reference gain, path-loss exponent 2.8, 20 dBm transmit power, -80 dBm
    noise and a detection coefficient of 0.2.
    """
    model_config = ConfigDict(extra='forbid')

    alice: Position2D = Position2D(x=0.0, y=0.0)
    bob: Position2D = Position2D(x=100.0, y=0.0)
    eve: Position2D = Position2D(x=150.0, y=5.0)
    willie: Position2D = Position2D(x=150.0, y=-5.0)

    wavelength: PositiveFloat = 0.125
    region_side: Optional[PositiveFloat] = None
    min_spacing: Optional[PositiveFloat] = None
    n_antennas: int = Field(4, ge=2)
    n_paths: int = Field(4, ge=1)
    paths_bob: Optional[int] = Field(None, ge=1)
    paths_eve: Optional[int] = Field(None, ge=1)
    paths_willie: Optional[int] = Field(None, ge=1)

    g0: PositiveFloat = 1e-4
    path_loss_exponent: PositiveFloat = 2.8
    pmax: PositiveFloat = 0.1
    sigma2: PositiveFloat = 1e-11
    epsilon: Probability = 0.2

    # Alternating optimization
    ao_tolerance: PositiveFloat = 1e-4
    max_rounds: int = Field(50, ge=1)
    ao_starts: int = Field(1, ge=1)

    # Penalty loop of the beamforming block
    penalty_init: PositiveFloat = 1.0
    penalty_growth: float = Field(1.5, gt=1.0)
    penalty_ceiling: PositiveFloat = 1e6
    penalty_max_iterations: int = Field(80, ge=1)
    beam_tolerance: PositiveFloat = 1e-4
    rank_one_tolerance: PositiveFloat = 1e-6

    feasibility_tolerance: PositiveFloat = 1e-8
    rpa_max_attempts: int = Field(100_000, ge=1)
    eas_max_antennas: int = Field(8, ge=2)
    cvx_solver: str = "CLARABEL"

    @model_validator(mode='before')
    @classmethod
    def convert_db_keys(cls, data: Any) -> Any:
        """Accept pmax_dbm / sigma2_dbm / g0_db and convert them to linear SI values."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for key, (field_name, convert) in DB_KEYS.items():
            if key not in data:
                continue
            if field_name in data:
                raise ValueError(f"Give either '{field_name}' or '{key}', not both")
            value = data.pop(key)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"'{key}' must be a number")
            data[field_name] = convert(float(value))
        return data

    @model_validator(mode='after')
    def fill_geometry_defaults(self):
        """Region side defaults to 4λ and spacing to λ/2; the region must hold N antennas."""
        if self.region_side is None:
            self.region_side = 4.0 * self.wavelength
        if self.min_spacing is None:
            self.min_spacing = 0.5 * self.wavelength

        per_side = math.floor(self.region_side / self.min_spacing + 1e-12) + 1
        if per_side * per_side < self.n_antennas:
            raise ValueError(
                f"A {self.region_side:g} m square region cannot hold {self.n_antennas} "
                f"antennas at spacing {self.min_spacing:g} m"
            )
        return self

    def paths_for(self, link: Link) -> int:
        override = {
            Link.BOB: self.paths_bob,
            Link.EVE: self.paths_eve,
            Link.WILLIE: self.paths_willie,
        }[link]
        return override if override is not None else self.n_paths

    def node_position(self, link: Link) -> Position2D:
        return {Link.BOB: self.bob, Link.EVE: self.eve, Link.WILLIE: self.willie}[link]

    def link_distance(self, link: Link) -> float:
        return float(np.linalg.norm(self.node_position(link).as_array() - self.alice.as_array()))


'''
EXPERIMENT SCHEMAS
'''

class ExperimentSpec(BaseModel):
    """A Monte-Carlo sweep: one axis, a set of schemes, a number of trials."""
    config: ScenarioConfig = Field(default_factory=ScenarioConfig)
    sweep_axis: SweepAxis
    sweep_values: List[FiniteFloat] = Field(..., min_length=1)
    schemes: List[SchemeName] = Field(..., min_length=1)
    trials: int = Field(100, ge=1)
    seed: Seed = 0
    output_path: Path
    plot_path: Optional[Path] = None
    jobs: int = Field(1, ge=1)

    @field_validator('sweep_values')
    @classmethod
    def validate_increasing(cls, values: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("Sweep values must be strictly increasing")
        return values

    @field_validator('schemes')
    @classmethod
    def validate_unique_schemes(cls, schemes: List[SchemeName]) -> List[SchemeName]:
        if len(set(schemes)) != len(schemes):
            raise ValueError("Each scheme may be listed only once")
        return schemes

    @model_validator(mode='after')
    def validate_sweep_range(self):
        if self.sweep_axis == SweepAxis.EPSILON and any(not 0.0 <= v <= 1.0 for v in self.sweep_values):
            raise ValueError("Epsilon sweep values must lie in [0, 1]")
        return self

    def config_at(self, value: float) -> ScenarioConfig:
        """Return the base config with the swept parameter set to *value*."""
        if self.sweep_axis == SweepAxis.PMAX:
            update = {"pmax": dbm_to_watts(value)}
        else:
            update = {"epsilon": value}
        return ScenarioConfig.model_validate({**self.config.model_dump(), **update})


class TrialRecord(BaseModel):
    """Outcome of one (scheme, sweep value, trial) work item."""
    scheme: SchemeName
    sweep_value: float
    trial: int = Field(..., ge=0)
    seed: int
    status: TrialStatus = TrialStatus.OK
    secrecy_rate_raw: Optional[float] = None
    secrecy_rate: Optional[float] = None
    willie_power: Optional[float] = None
    covert_slack: Optional[float] = None
    rounds: int = 0
    wall_time: float = 0.0
    error: Optional[str] = None

    @field_validator('covert_slack')
    @classmethod
    def validate_slack(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v < -1e-8:
            raise ValueError("Covert slack below -1e-8: the record violates the covert cap")
        return v

    def sort_key(self):
        return (list(SchemeName).index(self.scheme), self.sweep_value, self.trial)


class AggregateRow(BaseModel):
    """Mean and standard deviation of the clamped secrecy rate over successful trials."""
    scheme: SchemeName
    sweep_value: float
    mean_secrecy_rate: float
    std_secrecy_rate: float
    trials: int
    failed: int = 0


class ResultsTable(BaseModel):
    sweep_axis: SweepAxis
    records: List[TrialRecord] = Field(default_factory=list)
    aggregates: List[AggregateRow] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_aggregate_grid(self):
        """Aggregates form a full schemes x sweep values grid."""
        if self.aggregates:
            schemes = {row.scheme for row in self.aggregates}
            values = {row.sweep_value for row in self.aggregates}
            if len(self.aggregates) != len(schemes) * len(values):
                raise ValueError("Aggregate rows must cover every (scheme, sweep value) pair once")
        return self
