"""Pipeline from a scenario configuration to solver and simulator runs."""

from __future__ import annotations

from dataclasses import dataclass

from .config import ScenarioConfig
from .layout import DistanceMatrix, GridLayout, StationSpec, generate_layout, shortest_distances
from .model import (
    QnModel,
    RoutingTable,
    SystemSpec,
    build_qn_model,
    build_routing,
    build_trip_plan,
    order_classes,
)
from .simulator import SimConfig, SimMetrics, simulate
from .solver import SolveResult, solve
from .travel import KinematicsConfig, TravelTimeTable, build_travel_table


@dataclass(frozen=True)
class BuiltScenario:
    """Everything derived from one configuration, ready to solve or simulate."""

    config: ScenarioConfig
    layout: GridLayout
    dist: DistanceMatrix
    spec: SystemSpec
    travel: TravelTimeTable
    routing: RoutingTable
    model: QnModel


def build_layout(config: ScenarioConfig) -> GridLayout:
    lc = config.layout
    return generate_layout(
        tuple(lc.blocks),
        lc.shelf_rows,
        lc.shelf_cols,
        lc.cell_pitch_m,
        [StationSpec(w.side, w.workers, w.offset) for w in lc.workstations],
        StationSpec(lc.charging.side, lc.charging.chargers, lc.charging.offset),
    )


def build_spec(config: ScenarioConfig, dist: DistanceMatrix) -> SystemSpec:
    classes = order_classes(config.orders.lines_and_rates_per_s())
    plans = tuple(build_trip_plan(c, config.robots.buffer_positions) for c in classes)
    return SystemSpec(
        dist=dist,
        kin=KinematicsConfig(config.kinematics.speed_mps, config.kinematics.pick_time_s),
        classes=classes,
        plans=plans,
        workers=tuple(w.workers for w in config.layout.workstations),
        n_chargers=config.layout.charging.chargers,
        n_robots=config.robots.count,
        handling=(config.handling_time_s.min_s, config.handling_time_s.max_s),
        charging=(config.charging_time_s.min_s, config.charging_time_s.max_s),
        energy=(config.energy.charge_threshold_pct, config.energy.depletion_pct_per_min),
        policy=config.policy,
        storage_policy=config.storage_policy or config.policy,
    )


def build_travel(config: ScenarioConfig, spec: SystemSpec, layout: GridLayout) -> TravelTimeTable:
    return build_travel_table(
        layout,
        spec.dist,
        spec.kin,
        [c.probability for c in spec.classes],
        [list(p.totes_per_trip) for p in spec.plans],
        spec.p_w,
        spec.policy,
        storage_policy=spec.storage_policy,
        seed=config.seeds.travel,
        min_samples=config.monte_carlo.min_samples,
        max_episodes=config.monte_carlo.max_episodes,
    )


def build_scenario(config: ScenarioConfig) -> BuiltScenario:
    layout = build_layout(config)
    dist = shortest_distances(layout)
    spec = build_spec(config, dist)
    travel = build_travel(config, spec, layout)
    routing = build_routing(spec.classes, spec.plans, travel, spec.energy, list(spec.workers))
    model = build_qn_model(
        spec.classes,
        spec.plans,
        routing,
        travel,
        spec.handling,
        spec.charging,
        spec.n_robots,
        spec.n_chargers,
        list(spec.workers),
    )
    return BuiltScenario(
        config=config, layout=layout, dist=dist, spec=spec,
        travel=travel, routing=routing, model=model,
    )


def solve_scenario(
    config: ScenarioConfig,
    built: BuiltScenario | None = None,
    mode: str = "exact",
    scv_correction: bool = True,
) -> SolveResult:
    built = built or build_scenario(config)
    return solve(built.model, built.routing, built.travel, mode, scv_correction)


def sim_config_from(config: ScenarioConfig, **overrides) -> SimConfig:
    params = dict(
        replications=config.simulation.replications,
        horizon_hours=config.simulation.horizon_hours,
        warmup_hours=config.simulation.warmup_hours,
        master_seed=config.seeds.simulation,
    )
    params.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**params)


def simulate_scenario(
    config: ScenarioConfig, built: BuiltScenario | None = None, **overrides
) -> SimMetrics:
    built = built or build_scenario(config)
    return simulate(built.spec, sim_config_from(config, **overrides))
