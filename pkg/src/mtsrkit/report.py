"""Machine-readable result documents and delimited table output.

A ResultDocument echoes the scenario, carries the analytical and/or simulated
metrics plus their comparison, and serializes to sorted-key JSON. Identical
inputs and seeds produce byte-identical documents regardless of the interface
that produced them, so provenance carries seeds and a config digest rather
than wall-clock data.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .config import ScenarioConfig, config_sha256
from .simulator import ComparisonReport, SimMetrics
from .solver import SolveResult

SCHEMA = "mtsrkit.result/1"


def solve_result_to_dict(result: SolveResult) -> dict:
    doc = {
        "stable": result.stable,
        "throughput_max_per_s": result.throughput_max,
        "arrival_rate_per_s": result.arrival_rate,
        "n_robots": result.n_robots,
        "throughput_curve_per_s": list(result.th_curve),
    }
    if result.stable:
        doc.update(
            {
                "nr_sync": result.nr_sync,
                "no_sync": result.no_sync,
                "wt_w_s": list(result.wt_w),
                "wt_c_s": result.wt_c,
                "pn_w": [list(p) for p in result.pn_w],
                "pn_c": list(result.pn_c),
                "rho_r_pct": result.rho_r,
                "rho_w_pct": result.rho_w,
                "rho_c_pct": result.rho_c,
                "tht_o_s": list(result.tht_o),
                "tht_s": result.tht,
            }
        )
    return doc


def sim_metrics_to_dict(metrics: SimMetrics) -> dict:
    return {
        "tht_s": metrics.tht.as_dict(),
        "tht_o_s": [e.as_dict() for e in metrics.tht_o],
        "rho_r_pct": metrics.rho_r.as_dict(),
        "rho_w_pct": metrics.rho_w.as_dict(),
        "rho_c_pct": metrics.rho_c.as_dict(),
        "order_queue_len": metrics.order_queue_len.as_dict(),
        "totes_per_order": metrics.totes_per_order.as_dict(),
        "charges_per_order": metrics.charges_per_order.as_dict(),
        "replications": metrics.replications,
        "horizon_hours": metrics.horizon_hours,
        "warmup_hours": metrics.warmup_hours,
        "master_seed": metrics.master_seed,
        "warnings": list(metrics.warnings),
    }


def comparison_to_dict(report: ComparisonReport) -> dict:
    return {
        "rows": [
            {"metric": m, "analytical": a, "simulated": s, "delta_pct": d}
            for m, a, s, d in report.rows
        ]
    }


@dataclass(frozen=True)
class ResultDocument:
    scenario: dict
    analytical: Optional[dict]
    simulation: Optional[dict]
    comparison: Optional[dict]
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "scenario": self.scenario,
            "analytical": self.analytical,
            "simulation": self.simulation,
            "comparison": self.comparison,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def build_document(
    config: ScenarioConfig,
    analytical: Optional[SolveResult] = None,
    simulation: Optional[SimMetrics] = None,
    comparison: Optional[ComparisonReport] = None,
) -> ResultDocument:
    return ResultDocument(
        scenario=config.model_dump(mode="json"),
        analytical=solve_result_to_dict(analytical) if analytical else None,
        simulation=sim_metrics_to_dict(simulation) if simulation else None,
        comparison=comparison_to_dict(comparison) if comparison else None,
        provenance={
            "tool": "mtsrkit",
            "version": __version__,
            "seeds": config.seeds.model_dump(mode="json"),
            "config_sha256": config_sha256(config),
        },
    )


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
