"""Brute-force resource planning: the cheapest fleet that keeps the system
stable with every average resource utilization at or below the target.

The search grid spans robot count, charger count and total worker count
(workers spread across stations with at most a one-worker difference).
Analytical solves are cheap, so the grid is evaluated exhaustively; flow
identities (worker and charger utilization are arrival-rate-driven and almost
independent of the robot count) prune combinations that cannot become
feasible before any network solve runs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import ScenarioConfig
from .layout import shortest_distances
from .model import (
    SystemSpec,
    build_qn_model,
    build_routing,
    build_trip_plan,
    order_classes_from_mix,
)
from .scenario import build_layout
from .solver import SolveResult, solve
from .travel import KinematicsConfig, build_travel_table

FLOW_MARGIN = 0.5  # pct points of slack before trusting the flow-based prune


@dataclass(frozen=True)
class StabilityTarget:
    max_utilization: float = 90.0

    def __post_init__(self):
        if not 0 < self.max_utilization < 100:
            raise ValueError("target utilization must lie in (0, 100)")


@dataclass(frozen=True)
class SearchBounds:
    max_robots: int = 64
    max_chargers: int = 16
    max_workers: int = 12
    min_robots: int = 1
    min_chargers: int = 1


@dataclass(frozen=True)
class PlanResult:
    n_robots: int
    n_chargers: int
    workers: tuple
    result: SolveResult
    lambda_per_min: float
    policy: str


def spread_workers(total: int, n_stations: int) -> tuple:
    """Even allocation, earlier stations absorb the remainder."""
    if total < n_stations:
        raise ValueError("need at least one worker per station")
    base, extra = divmod(total, n_stations)
    return tuple(base + (1 if i < extra else 0) for i in range(n_stations))


def _class_mix(config: ScenarioConfig):
    pairs = config.orders.lines_and_rates_per_s()
    total = sum(rate for _, rate in pairs)
    return [(lines, rate / total) for lines, rate in pairs]


def minimize_resources(
    config: ScenarioConfig,
    lam_per_min: float | None = None,
    target: StabilityTarget = StabilityTarget(),
    bounds: SearchBounds = SearchBounds(),
    scv_correction: bool = True,
    _travel_cache: dict | None = None,
) -> PlanResult:
    """Exhaustive grid search for the minimum feasible robot count.

    Feasible: stable and every utilization <= target. Ties on the robot count
    break toward maximum robot utilization, then fewer chargers plus workers,
    then lower order throughput time, then the (chargers, workers) index.
    Raises RuntimeError when no configuration within bounds is feasible.
    """
    lam_s = (
        config.total_rate_per_s if lam_per_min is None else lam_per_min / 60.0
    )
    mix = _class_mix(config)
    classes = order_classes_from_mix(mix, lam_s)
    plans = tuple(build_trip_plan(c, config.robots.buffer_positions) for c in classes)
    layout = build_layout(config)
    dist = shortest_distances(layout)
    kin = KinematicsConfig(config.kinematics.speed_mps, config.kinematics.pick_time_s)
    n_stations = len(config.layout.workstations)
    a, b = config.handling_time_s.min_s, config.handling_time_s.max_s
    c_lo, c_hi = config.charging_time_s.min_s, config.charging_time_s.max_s
    energy = (config.energy.charge_threshold_pct, config.energy.depletion_pct_per_min)
    policy = config.policy
    storage_policy = config.storage_policy or policy
    cache = _travel_cache if _travel_cache is not None else {}

    mean_totes = sum(p * lines for lines, p in mix)
    mean_handling = (a + b) / 2.0
    charge_mean = (c_lo + c_hi) / 2.0

    def travel_for(workers):
        key = (policy, storage_policy, workers)
        if key not in cache:
            p_w = [w / sum(workers) for w in workers]
            cache[key] = build_travel_table(
                layout, dist, kin,
                [p for _, p in mix],
                [list(p.totes_per_trip) for p in plans],
                p_w, policy,
                storage_policy=storage_policy,
                seed=config.seeds.travel,
                min_samples=config.monte_carlo.min_samples,
                max_episodes=config.monte_carlo.max_episodes,
            )
        return cache[key]

    best = None  # (n_r, -rho_r, n_c + W, tht, n_c, W, plan)
    for total_workers in range(n_stations, bounds.max_workers + 1):
        workers = spread_workers(total_workers, n_stations)
        rho_w_flow = lam_s * mean_totes * mean_handling / total_workers * 100.0
        if rho_w_flow > target.max_utilization + FLOW_MARGIN:
            continue
        travel = travel_for(workers)
        routing = build_routing(classes, plans, travel, energy, list(workers))
        v_charge = sum(
            c.probability * routing.p_charge[o][plans[o].trips - 1]
            for o, c in enumerate(classes)
        )
        for n_chargers in range(bounds.min_chargers, bounds.max_chargers + 1):
            rho_c_flow = lam_s * v_charge * charge_mean / n_chargers * 100.0
            if rho_c_flow > target.max_utilization + FLOW_MARGIN:
                continue
            for n_robots in range(bounds.min_robots, bounds.max_robots + 1):
                if best is not None and n_robots > best[0]:
                    break
                model = build_qn_model(
                    classes, plans, routing, travel, (a, b), (c_lo, c_hi),
                    n_robots, n_chargers, list(workers),
                )
                result = solve(model, routing, travel, scv_correction=scv_correction)
                if not result.stable:
                    continue
                if max(result.rho_r, result.rho_w, result.rho_c) > target.max_utilization:
                    continue
                plan = PlanResult(
                    n_robots=n_robots,
                    n_chargers=n_chargers,
                    workers=workers,
                    result=result,
                    lambda_per_min=lam_s * 60.0,
                    policy=policy,
                )
                key = (
                    n_robots, -result.rho_r, n_chargers + total_workers,
                    result.tht, n_chargers, total_workers,
                )
                if best is None or key < best[0:6]:
                    best = key + (plan,)
                break  # larger robot counts cannot improve this (W, n_c) pair
    if best is None:
        raise RuntimeError("no feasible configuration within the search bounds")
    return best[-1]
