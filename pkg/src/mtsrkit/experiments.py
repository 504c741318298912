"""Validation sweeps: vary robots, buffer positions, or the arrival rate.

Each sweep returns plain row dicts; the CLI writes them as CSV next to a
rendered figure. Robot and buffer sweeps compare the analytical solution with
the simulator per grid point; the rate sweep runs the resource planner.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .config import ScenarioConfig
from .model import build_qn_model
from .planner import PlanResult, SearchBounds, StabilityTarget, minimize_resources
from .plots import plan_figure, sweep_figure
from .report import write_csv
from .scenario import build_scenario, sim_config_from
from .simulator import compare, simulate
from .solver import solve

POLICIES = ("random", "cr")
METRICS = ("rho_r", "rho_w", "rho_c", "tht")


def _with_policy(config: ScenarioConfig, policy: str) -> ScenarioConfig:
    return config.model_copy(update={"policy": policy, "storage_policy": None})


def _with_robots(config: ScenarioConfig, n: int) -> ScenarioConfig:
    robots = config.robots.model_copy(update={"count": n})
    return config.model_copy(update={"robots": robots})


def _with_buffer(config: ScenarioConfig, c: int) -> ScenarioConfig:
    robots = config.robots.model_copy(update={"buffer_positions": c})
    return config.model_copy(update={"robots": robots})


def _metric_values(result, sim_metrics):
    values = {
        "rho_r_a": result.rho_r,
        "rho_w_a": result.rho_w,
        "rho_c_a": result.rho_c,
        "tht_a": result.tht,
    }
    if sim_metrics is not None:
        report = compare(result, sim_metrics)
        sim_map = {
            "rho_r": sim_metrics.rho_r.mean,
            "rho_w": sim_metrics.rho_w.mean,
            "rho_c": sim_metrics.rho_c.mean,
            "tht": sim_metrics.tht.mean,
        }
        for name in METRICS:
            values[f"{name}_s"] = sim_map[name]
            values[f"{name}_delta"] = report.delta(name)
    return values


def robots_sweep(
    config: ScenarioConfig,
    robot_counts,
    policies=POLICIES,
    with_sim: bool = True,
    sim_overrides: dict | None = None,
):
    """Analytical (and optionally simulated) metrics across fleet sizes."""
    rows = []
    for policy in policies:
        cfg = _with_policy(config, policy)
        built = build_scenario(cfg)
        for n in robot_counts:
            model = build_qn_model(
                built.spec.classes, built.spec.plans, built.routing, built.travel,
                built.spec.handling, built.spec.charging,
                n, built.spec.n_chargers, list(built.spec.workers),
            )
            result = solve(model, built.routing, built.travel)
            sim_metrics = None
            if with_sim and result.stable:
                spec = dataclasses.replace(built.spec, n_robots=n)
                sim_metrics = simulate(spec, sim_config_from(cfg, **(sim_overrides or {})))
            row = {"policy": policy, "n_robots": n, "stable": result.stable}
            if result.stable:
                row.update(_metric_values(result, sim_metrics))
            rows.append(row)
    return rows


def buffer_sweep(
    config: ScenarioConfig,
    buffer_sizes,
    policies=POLICIES,
    with_sim: bool = False,
    sim_overrides: dict | None = None,
):
    """Analytical (and optionally simulated) metrics across buffer positions."""
    rows = []
    for policy in policies:
        for c in buffer_sizes:
            cfg = _with_buffer(_with_policy(config, policy), c)
            built = build_scenario(cfg)
            result = solve(built.model, built.routing, built.travel)
            sim_metrics = None
            if with_sim and result.stable:
                sim_metrics = simulate(built.spec, sim_config_from(cfg, **(sim_overrides or {})))
            row = {
                "policy": policy,
                "buffer_positions": c,
                "stable": result.stable,
                "tht_o_a": list(result.tht_o) if result.stable else None,
            }
            if result.stable:
                row.update(_metric_values(result, sim_metrics))
            rows.append(row)
    return rows


def rate_sweep(
    config: ScenarioConfig,
    rates_per_min,
    policies=POLICIES,
    target: StabilityTarget = StabilityTarget(),
    bounds: SearchBounds = SearchBounds(),
):
    """Minimum-resource plans across arrival rates, per policy."""
    rows = []
    for policy in policies:
        cfg = _with_policy(config, policy)
        cache = {}
        for lam in rates_per_min:
            plan = minimize_resources(cfg, lam, target, bounds, _travel_cache=cache)
            rows.append(plan_row(plan))
    return rows


def plan_row(plan: PlanResult) -> dict:
    return {
        "policy": plan.policy,
        "lambda_per_min": plan.lambda_per_min,
        "n_robots": plan.n_robots,
        "n_chargers": plan.n_chargers,
        "n_workers": sum(plan.workers),
        "workers_by_station": list(plan.workers),
        "tht_a": plan.result.tht,
        "rho_r_a": plan.result.rho_r,
        "rho_w_a": plan.result.rho_w,
        "rho_c_a": plan.result.rho_c,
    }


def delta_averages(rows) -> dict:
    """Mean relative error per metric over the stable grid rows."""
    out = {}
    for name in METRICS:
        key = f"{name}_delta"
        deltas = [r[key] for r in rows if r.get("stable") and key in r]
        out[name] = sum(deltas) / len(deltas) if deltas else None
    return out


def _ordered_fields(rows):
    fields = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    return fields


def write_sweep_outputs(rows, outdir, stem, x_key, x_label):
    """CSV plus a figure; returns the file paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fields = _ordered_fields(rows)
    csv_path = outdir / f"{stem}.csv"
    write_csv(csv_path, fields, [[row.get(f, "") for f in fields] for row in rows])
    fig_path = outdir / f"{stem}.png"
    by_policy = {}
    for row in rows:
        if row.get("stable"):
            by_policy.setdefault(row["policy"], []).append(row)
    if x_key == "lambda_per_min":
        by_policy = {}
        for row in rows:
            by_policy.setdefault(row["policy"], []).append(row)
        plan_figure(fig_path, by_policy)
    else:
        keys = [("rho_r", "robot utilization (%)"), ("tht", "order throughput time (s)")]
        sweep_figure(fig_path, x_label, by_policy, x_key, keys)
    return csv_path, fig_path
