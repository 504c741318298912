import itertools

import pytest

from mtsrkit.config import parse_config_dict, reference_scenario
from mtsrkit.layout import shortest_distances
from mtsrkit.model import (
    build_qn_model,
    build_routing,
    build_trip_plan,
    order_classes_from_mix,
)
from mtsrkit.planner import (
    PlanResult,
    SearchBounds,
    StabilityTarget,
    minimize_resources,
    spread_workers,
)
from mtsrkit.scenario import build_layout
from mtsrkit.solver import solve
from mtsrkit.travel import KinematicsConfig, build_travel_table


def tiny_config():
    """Small, fast scenario for enumeration comparisons."""
    import json
    from importlib import resources

    payload = json.loads(
        resources.files("mtsrkit.data").joinpath("reference_scenario.json").read_text()
    )
    payload["layout"]["blocks"] = [1, 1]
    payload["layout"]["shelf_rows"] = 2
    payload["layout"]["shelf_cols"] = 4
    payload["orders"]["classes"] = [
        {"lines": 1, "probability": 0.5},
        {"lines": 3, "probability": 0.5},
    ]
    payload["orders"]["total_rate_per_min"] = 3.0
    payload["robots"]["buffer_positions"] = 2
    return parse_config_dict(payload)


def test_spread_workers_at_most_one_apart():
    for total in range(3, 13):
        alloc = spread_workers(total, 3)
        assert sum(alloc) == total
        assert max(alloc) - min(alloc) <= 1
    with pytest.raises(ValueError):
        spread_workers(2, 3)


def test_zero_rate_returns_minimum_bounds():
    plan = minimize_resources(
        reference_scenario(), lam_per_min=0.0,
        bounds=SearchBounds(max_robots=5, max_chargers=3, max_workers=5),
    )
    assert plan.n_robots == 1
    assert plan.n_chargers == 1
    assert plan.workers == (1, 1, 1)
    assert plan.result.rho_r == 0.0


def exhaustive_oracle(config, lam_per_min, target, bounds):
    """Direct full-grid enumeration with an independent feasibility recheck."""
    mix_pairs = config.orders.lines_and_rates_per_s()
    total = sum(r for _, r in mix_pairs)
    mix = [(l, r / total) for l, r in mix_pairs]
    lam_s = lam_per_min / 60.0
    classes = order_classes_from_mix(mix, lam_s)
    plans = tuple(build_trip_plan(c, config.robots.buffer_positions) for c in classes)
    layout = build_layout(config)
    dist = shortest_distances(layout)
    kin = KinematicsConfig(config.kinematics.speed_mps, config.kinematics.pick_time_s)
    n_stations = len(config.layout.workstations)
    feasible = []
    for w_total, n_c, n_r in itertools.product(
        range(n_stations, bounds.max_workers + 1),
        range(1, bounds.max_chargers + 1),
        range(1, bounds.max_robots + 1),
    ):
        workers = spread_workers(w_total, n_stations)
        p_w = [w / w_total for w in workers]
        travel = build_travel_table(
            layout, dist, kin, [p for _, p in mix],
            [list(p.totes_per_trip) for p in plans], p_w,
            config.policy, seed=config.seeds.travel,
        )
        routing = build_routing(
            classes, plans, travel,
            (config.energy.charge_threshold_pct, config.energy.depletion_pct_per_min),
            list(workers),
        )
        model = build_qn_model(
            classes, plans, routing, travel,
            (config.handling_time_s.min_s, config.handling_time_s.max_s),
            (config.charging_time_s.min_s, config.charging_time_s.max_s),
            n_r, n_c, list(workers),
        )
        result = solve(model, routing, travel)
        if result.stable and max(result.rho_r, result.rho_w, result.rho_c) <= target:
            feasible.append(
                (n_r, -result.rho_r, n_c + w_total, result.tht, n_c, w_total, workers, result)
            )
    assert feasible, "oracle found no feasible configuration"
    return min(feasible)


def test_matches_exhaustive_enumeration_oracle():
    config = tiny_config()
    bounds = SearchBounds(max_robots=9, max_chargers=2, max_workers=4)
    plan = minimize_resources(config, lam_per_min=3.0, target=StabilityTarget(90.0), bounds=bounds)
    oracle = exhaustive_oracle(config, 3.0, 90.0, bounds)
    assert plan.n_robots == oracle[0]
    assert plan.n_chargers == oracle[4]
    assert sum(plan.workers) == oracle[5]
    assert plan.result.tht == pytest.approx(oracle[7].tht, rel=1e-12)


def test_plan_reverifies_standalone():
    config = tiny_config()
    plan = minimize_resources(
        config, lam_per_min=3.0,
        bounds=SearchBounds(max_robots=8, max_chargers=2, max_workers=4),
    )
    # rebuild the chosen configuration from scratch and re-check feasibility
    oracle_best = exhaustive_oracle(
        config, 3.0, 90.0,
        SearchBounds(max_robots=plan.n_robots, max_chargers=plan.n_chargers,
                     max_workers=sum(plan.workers)),
    )
    result = oracle_best[7]
    assert result.stable
    assert max(result.rho_r, result.rho_w, result.rho_c) <= 90.0
    assert max(plan.workers) - min(plan.workers) <= 1


def test_infeasible_bounds_raise():
    config = tiny_config()
    with pytest.raises(RuntimeError):
        minimize_resources(
            config, lam_per_min=50.0,
            bounds=SearchBounds(max_robots=2, max_chargers=1, max_workers=3),
        )


def test_minimum_robots_nondecreasing_in_rate():
    config = tiny_config()
    bounds = SearchBounds(max_robots=24, max_chargers=4, max_workers=6)
    cache = {}
    previous = 0
    for lam in (1.0, 2.0, 4.0):
        plan = minimize_resources(config, lam, bounds=bounds, _travel_cache=cache)
        assert plan.n_robots >= previous
        previous = plan.n_robots
