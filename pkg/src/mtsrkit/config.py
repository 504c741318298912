"""Scenario configuration: strict JSON schema, validation, canonical echo.

Every physical parameter is an explicit field (no hidden defaults); unknown
keys are rejected. Order classes are given either as (lines, rate_per_min)
pairs or as (lines, probability) pairs plus a total rate. The canonical
serialization is sorted-key JSON so identical scenarios are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError

PROB_TOL = 1e-9


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StationConfig(_Strict):
    side: Literal["west", "south", "east", "north"]
    workers: int = Field(ge=1)
    offset: Optional[int] = None


class ChargingStationConfig(_Strict):
    side: Literal["west", "south", "east", "north"]
    chargers: int = Field(ge=1)
    offset: Optional[int] = None


class LayoutConfig(_Strict):
    blocks: tuple[int, int]
    shelf_rows: int = Field(ge=1)
    shelf_cols: int = Field(ge=1)
    cell_pitch_m: float = Field(gt=0)
    workstations: list[StationConfig] = Field(min_length=1)
    charging: ChargingStationConfig

    @model_validator(mode="after")
    def _check_blocks(self):
        if self.blocks[0] < 1 or self.blocks[1] < 1:
            raise ValueError("block counts must be >= 1")
        return self


class KinematicsSection(_Strict):
    speed_mps: float = Field(gt=0)
    pick_time_s: float = Field(ge=0)


class OrderClassConfig(_Strict):
    lines: int = Field(ge=1)
    rate_per_min: Optional[float] = Field(default=None, gt=0)
    probability: Optional[float] = Field(default=None, gt=0, le=1)

    @model_validator(mode="after")
    def _one_form(self):
        if (self.rate_per_min is None) == (self.probability is None):
            raise ValueError("give exactly one of rate_per_min or probability")
        return self


class OrdersConfig(_Strict):
    classes: list[OrderClassConfig] = Field(min_length=1)
    total_rate_per_min: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _consistent(self):
        with_prob = [c for c in self.classes if c.probability is not None]
        if with_prob and len(with_prob) != len(self.classes):
            raise ValueError("mix of probability and rate_per_min class forms")
        if with_prob:
            if self.total_rate_per_min is None:
                raise ValueError("probability form needs total_rate_per_min")
            total = sum(c.probability for c in self.classes)
            if abs(total - 1.0) > PROB_TOL:
                raise ValueError(f"class probabilities sum to {total:.6g}, expected 1")
        elif self.total_rate_per_min is not None:
            raise ValueError("total_rate_per_min only applies to the probability form")
        lines = [c.lines for c in self.classes]
        if len(set(lines)) != len(lines):
            raise ValueError("duplicate line counts across classes")
        return self

    def lines_and_rates_per_s(self) -> list:
        if self.total_rate_per_min is not None:
            lam = self.total_rate_per_min / 60.0
            return [(c.lines, lam * c.probability) for c in self.classes]
        return [(c.lines, c.rate_per_min / 60.0) for c in self.classes]


class RobotsConfig(_Strict):
    count: int = Field(ge=1)
    buffer_positions: int = Field(ge=1)


class UniformIntervalConfig(_Strict):
    min_s: float = Field(ge=0)
    max_s: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.min_s > self.max_s:
            raise ValueError("min_s must not exceed max_s")
        return self


class EnergyConfig(_Strict):
    charge_threshold_pct: float = Field(ge=0, lt=100)
    depletion_pct_per_min: float = Field(ge=0)


class SeedsConfig(_Strict):
    travel: int = 1
    simulation: int = 20_240_001


class MonteCarloConfig(_Strict):
    min_samples: int = Field(default=1000, ge=2)
    max_episodes: int = Field(default=500_000, ge=1000)


class SimulationConfig(_Strict):
    replications: int = Field(default=5, ge=1)
    horizon_hours: float = Field(default=200.0, gt=0)
    warmup_hours: Optional[float] = Field(default=None, ge=0)


class ScenarioConfig(_Strict):
    """Complete description of one what-if scenario."""

    layout: LayoutConfig
    kinematics: KinematicsSection
    orders: OrdersConfig
    robots: RobotsConfig
    handling_time_s: UniformIntervalConfig
    charging_time_s: UniformIntervalConfig
    energy: EnergyConfig
    policy: Literal["random", "cr"]
    storage_policy: Optional[Literal["random", "cr"]] = None
    seeds: SeedsConfig = SeedsConfig()
    monte_carlo: MonteCarloConfig = MonteCarloConfig()
    simulation: SimulationConfig = SimulationConfig()

    @property
    def total_rate_per_s(self) -> float:
        return sum(rate for _, rate in self.orders.lines_and_rates_per_s())


def _format_errors(exc: ValidationError) -> list:
    out = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        out.append({"loc": loc, "msg": err["msg"]})
    return out


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate scenario JSON; raises ConfigError listing every
    violated field with its path."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([{"loc": "<document>", "msg": f"invalid JSON: {exc}"}]) from exc
    try:
        return ScenarioConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from exc


def parse_config_dict(payload: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from exc


def canonical_json(config: ScenarioConfig) -> str:
    """Sorted-key serialization; byte-stable for identical scenarios."""
    return json.dumps(config.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def config_sha256(config: ScenarioConfig) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def reference_scenario() -> ScenarioConfig:
    """The in-repo reference scenario used by validation and acceptance."""
    text = resources.files("mtsrkit.data").joinpath("reference_scenario.json").read_text()
    return parse_config(text)
