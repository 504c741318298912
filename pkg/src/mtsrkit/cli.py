"""Command-line interface: solve, simulate, validate, traveltime, optimize, serve."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import __version__
from .config import ScenarioConfig, parse_config
from .errors import ConfigError, EnergyModelError, LayoutError, SampleBudgetError
from .experiments import (
    buffer_sweep,
    delta_averages,
    plan_row,
    rate_sweep,
    robots_sweep,
    write_sweep_outputs,
)
from .planner import SearchBounds, StabilityTarget, minimize_resources
from .report import build_document, write_csv
from .scenario import build_scenario, sim_config_from, solve_scenario
from .simulator import compare, simulate


def _load_config(path) -> ScenarioConfig:
    try:
        return parse_config(Path(path).read_text())
    except ConfigError as exc:
        for err in exc.errors:
            click.echo(f"config error at {err['loc']}: {err['msg']}", err=True)
        sys.exit(1)


def _emit(text: str, output):
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _apply_overrides(config: ScenarioConfig, policy, seed_travel) -> ScenarioConfig:
    if policy:
        config = config.model_copy(update={"policy": policy, "storage_policy": None})
    if seed_travel is not None:
        seeds = config.seeds.model_copy(update={"travel": seed_travel})
        config = config.model_copy(update={"seeds": seeds})
    return config


config_opt = click.option(
    "-c", "--config", "config_path", required=True,
    type=click.Path(exists=True, dir_okay=False), help="Scenario JSON file.",
)
output_opt = click.option("-o", "--output", type=click.Path(), help="Write the result here instead of stdout.")
policy_opt = click.option("--policy", type=click.Choice(["random", "cr"]), help="Override the scenario policy.")
seed_travel_opt = click.option("--seed-travel", type=int, help="Override the travel-time sampling seed.")


@click.group()
@click.version_option(__version__)
def main():
    """Steady-state performance toolkit for multi-tote robot warehouses."""


@main.command()
@config_opt
@output_opt
@policy_opt
@seed_travel_opt
@click.option("--mode", type=click.Choice(["exact", "approximate"]), default="exact", show_default=True)
def solve(config_path, output, policy, seed_travel, mode):
    """Analytical steady-state solve."""
    config = _apply_overrides(_load_config(config_path), policy, seed_travel)
    try:
        result = solve_scenario(config, mode=mode)
    except (EnergyModelError, LayoutError, SampleBudgetError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    doc = build_document(config, analytical=result)
    _emit(doc.to_json(), output)
    if not result.stable:
        click.echo(
            f"unstable: arrival rate {result.arrival_rate:.6g}/s >= max throughput "
            f"{result.throughput_max:.6g}/s",
            err=True,
        )
        sys.exit(1)


@main.command(name="simulate")
@config_opt
@output_opt
@policy_opt
@click.option("--replications", type=int, help="Override replication count.")
@click.option("--horizon-hours", type=float, help="Override the simulated horizon.")
@click.option("--warmup-hours", type=float, help="Override the warmup.")
@click.option("--seed", type=int, help="Override the simulation master seed.")
def simulate_cmd(config_path, output, policy, replications, horizon_hours, warmup_hours, seed):
    """Discrete-event simulation."""
    config = _apply_overrides(_load_config(config_path), policy, None)
    built = build_scenario(config)
    sim_cfg = sim_config_from(
        config,
        replications=replications,
        horizon_hours=horizon_hours,
        warmup_hours=warmup_hours,
        master_seed=seed,
    )
    metrics = simulate(built.spec, sim_cfg)
    doc = build_document(config, simulation=metrics)
    _emit(doc.to_json(), output)
    for warning in metrics.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command()
@config_opt
@output_opt
@policy_opt
@click.option("--replications", type=int, help="Override replication count.")
@click.option("--horizon-hours", type=float, help="Override the simulated horizon.")
@click.option("--seed", type=int, help="Override the simulation master seed.")
@click.option(
    "--grid", type=click.Choice(["none", "robots", "buffers"]), default="none",
    show_default=True, help="Sweep a parameter and emit a validation table.",
)
@click.option("--values", help="Comma-separated grid values, e.g. 16,18,20,22,24.")
@click.option("--outdir", type=click.Path(), default="reports", show_default=True)
@click.option("--policies", default="random,cr", show_default=True)
def validate(config_path, output, policy, replications, horizon_hours, seed, grid, values, outdir, policies):
    """Analytical vs simulated comparison; optionally over a parameter grid."""
    config = _apply_overrides(_load_config(config_path), policy, None)
    sim_overrides = dict(replications=replications, horizon_hours=horizon_hours, master_seed=seed)
    if grid == "none":
        built = build_scenario(config)
        result = solve_scenario(config, built=built)
        if not result.stable:
            click.echo(
                f"unstable: arrival rate {result.arrival_rate:.6g}/s >= max throughput "
                f"{result.throughput_max:.6g}/s; simulation skipped",
                err=True,
            )
            sys.exit(1)
        metrics = simulate(built.spec, sim_config_from(config, **sim_overrides))
        doc = build_document(config, analytical=result, simulation=metrics,
                             comparison=compare(result, metrics))
        _emit(doc.to_json(), output)
        return

    grid_values = [int(v) for v in (values or "").split(",") if v] or (
        [16, 18, 20, 22, 24] if grid == "robots" else [1, 2, 3, 4, 5]
    )
    policy_list = [p.strip() for p in policies.split(",") if p.strip()]
    if grid == "robots":
        rows = robots_sweep(config, grid_values, policy_list, True, sim_overrides)
        csv_path, fig_path = write_sweep_outputs(rows, outdir, "validation_robots", "n_robots", "robots")
    else:
        rows = buffer_sweep(config, grid_values, policy_list, True, sim_overrides)
        csv_path, fig_path = write_sweep_outputs(
            rows, outdir, "validation_buffers", "buffer_positions", "buffer positions"
        )
    averages = delta_averages(rows)
    click.echo(f"wrote {csv_path} and {fig_path}")
    for metric, avg in averages.items():
        if avg is not None:
            click.echo(f"average delta {metric}: {avg:.2f}%")


@main.command()
@config_opt
@output_opt
@policy_opt
@seed_travel_opt
def traveltime(config_path, output, policy, seed_travel):
    """Travel-time table (Monte Carlo for the CR policy)."""
    config = _apply_overrides(_load_config(config_path), policy, seed_travel)
    built = build_scenario(config)
    rows = []
    for o, plan in enumerate(built.spec.plans):
        for t in range(plan.trips):
            for i in range(len(built.spec.workers)):
                rows.append([
                    built.spec.classes[o].lines, t + 1, i,
                    plan.totes_per_trip[t],
                    f"{built.travel.retrieve[o][t][i]:.6f}",
                    f"{built.travel.store[o][t][i]:.6f}",
                ])
    header = ["lines", "trip", "workstation", "totes", "retrieve_s", "store_s"]
    if output:
        write_csv(output, header, rows)
        click.echo(f"wrote {output}")
    else:
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join(str(v) for v in row))
    click.echo(f"dwell_to_charge_s,{built.travel.dwell_to_charge:.6f}")
    click.echo(f"charge_to_dwell_s,{built.travel.charge_to_dwell:.6f}")
    if built.travel.policy == "cr":
        episodes = built.travel.estimates.get("episodes")
        click.echo(f"monte_carlo_episodes,{episodes}")


@main.command()
@config_opt
@output_opt
@click.option("--rates", help="Comma-separated arrival rates (orders/min); default: the scenario's rate.")
@click.option("--target", type=float, default=90.0, show_default=True, help="Utilization ceiling (%).")
@click.option("--max-robots", type=int, default=64, show_default=True)
@click.option("--max-chargers", type=int, default=16, show_default=True)
@click.option("--max-workers", type=int, default=12, show_default=True)
@click.option("--policies", default=None, help="Comma-separated policies; default: the scenario's policy.")
@click.option("--outdir", type=click.Path(), default="reports", show_default=True)
def optimize(config_path, output, rates, target, max_robots, max_chargers, max_workers, policies, outdir):
    """Minimum resources keeping utilizations under the target."""
    config = _load_config(config_path)
    rate_values = (
        [float(v) for v in rates.split(",") if v]
        if rates
        else [config.total_rate_per_s * 60.0]
    )
    policy_list = (
        [p.strip() for p in policies.split(",") if p.strip()]
        if policies
        else [config.policy]
    )
    bounds = SearchBounds(max_robots=max_robots, max_chargers=max_chargers, max_workers=max_workers)
    try:
        rows = rate_sweep(config, rate_values, policy_list, StabilityTarget(target), bounds)
    except RuntimeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    csv_path, fig_path = write_sweep_outputs(rows, outdir, "optimize_rates", "lambda_per_min", "orders/min")
    click.echo(f"wrote {csv_path} and {fig_path}")
    if output:
        import json

        Path(output).write_text(json.dumps({"plans": rows}, sort_keys=True, indent=2) + "\n")


@main.command()
@click.option("--host", default=None, help="Listen address (default: MTSRKIT_HOST or 127.0.0.1).")
@click.option("--port", type=int, default=None, help="Listen port (default: MTSRKIT_PORT or 8000).")
def serve(host, port):
    """Run the what-if HTTP service."""
    import uvicorn

    from .server import create_app

    uvicorn.run(
        create_app(),
        host=host or os.environ.get("MTSRKIT_HOST", "127.0.0.1"),
        port=port or int(os.environ.get("MTSRKIT_PORT", "8000")),
    )


if __name__ == "__main__":
    main()
