"""HTTP service behind the what-if console.

Analytical solves and optimization answer synchronously; simulations run as
jobs on a bounded worker pool and are polled via /jobs/{id}. Solve responses
are emitted as pre-serialized canonical bytes so they are byte-identical to
the CLI's output for the same scenario and seeds.
"""

from __future__ import annotations

import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .config import parse_config_dict
from .errors import ConfigError, EnergyModelError, LayoutError, SampleBudgetError
from .experiments import rate_sweep
from .planner import SearchBounds, StabilityTarget
from .report import build_document
from .scenario import build_scenario, sim_config_from, solve_scenario
from .simulator import compare, simulate


def _error_response(status: int, errors) -> JSONResponse:
    return JSONResponse(status_code=status, content={"errors": errors})


def create_app(frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="mtsrkit", version=__version__)
    scenarios: dict = {}
    jobs: dict = {}
    jobs_lock = threading.Lock()
    pool = ThreadPoolExecutor(max_workers=int(os.environ.get("MTSRKIT_JOB_WORKERS", "2")))
    queue_cap = int(os.environ.get("MTSRKIT_JOB_QUEUE", "16"))

    async def read_config(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return None, _error_response(
                400, [{"loc": "<document>", "msg": "request body is not valid JSON"}]
            )
        try:
            return parse_config_dict(payload), None
        except ConfigError as exc:
            return None, _error_response(400, exc.errors)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.post("/solve")
    async def solve_endpoint(request: Request):
        config, err = await read_config(request)
        if err:
            return err
        try:
            result = solve_scenario(config)
        except (EnergyModelError, LayoutError, SampleBudgetError) as exc:
            return _error_response(400, [{"loc": "<scenario>", "msg": str(exc)}])
        if not result.stable:
            return JSONResponse(
                status_code=409,
                content={
                    "errors": [{"loc": "<scenario>", "msg": "unstable configuration"}],
                    "max_throughput_per_s": result.throughput_max,
                    "arrival_rate_per_s": result.arrival_rate,
                },
            )
        doc = build_document(config, analytical=result)
        return Response(content=doc.to_json(), media_type="application/json")

    def run_simulation_job(job_id: str, config):
        with jobs_lock:
            jobs[job_id]["status"] = "running"
        try:
            built = build_scenario(config)
            metrics = simulate(built.spec, sim_config_from(config))
            result = solve_scenario(config, built=built)
            comparison = compare(result, metrics) if result.stable else None
            doc = build_document(
                config,
                analytical=result if result.stable else None,
                simulation=metrics,
                comparison=comparison,
            )
            with jobs_lock:
                jobs[job_id].update(status="done", result=doc.to_dict())
        except Exception as exc:  # job carries the failure to the poller
            with jobs_lock:
                jobs[job_id].update(status="failed", error=str(exc))

    @app.post("/simulate", status_code=202)
    async def simulate_endpoint(request: Request):
        config, err = await read_config(request)
        if err:
            return err
        with jobs_lock:
            active = sum(1 for j in jobs.values() if j["status"] in ("queued", "running"))
            if active >= queue_cap:
                return _error_response(
                    503, [{"loc": "<service>", "msg": "job queue full; retry later"}]
                )
            job_id = uuid.uuid4().hex
            jobs[job_id] = {"status": "queued", "result": None, "error": None}
        pool.submit(run_simulation_job, job_id, config)
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        with jobs_lock:
            job = jobs.get(job_id)
            if job is None:
                return _error_response(404, [{"loc": "job_id", "msg": "unknown job"}])
            return dict(job)

    @app.post("/optimize")
    async def optimize_endpoint(
        request: Request,
        rates: str | None = None,
        target: float = 90.0,
        max_robots: int = 64,
        max_chargers: int = 16,
        max_workers: int = 12,
    ):
        config, err = await read_config(request)
        if err:
            return err
        rate_values = (
            [float(v) for v in rates.split(",") if v]
            if rates
            else [config.total_rate_per_s * 60.0]
        )
        try:
            rows = rate_sweep(
                config,
                rate_values,
                [config.policy],
                StabilityTarget(target),
                SearchBounds(
                    max_robots=max_robots, max_chargers=max_chargers, max_workers=max_workers
                ),
            )
        except RuntimeError as exc:
            return _error_response(409, [{"loc": "<scenario>", "msg": str(exc)}])
        return {
            "schema": "mtsrkit.plan/1",
            "scenario": config.model_dump(mode="json"),
            "plans": rows,
            "provenance": {"tool": "mtsrkit", "version": __version__},
        }

    @app.get("/scenarios")
    def list_scenarios():
        return {"scenarios": sorted(scenarios)}

    @app.get("/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str):
        if scenario_id not in scenarios:
            return _error_response(404, [{"loc": "scenario_id", "msg": "unknown scenario"}])
        return scenarios[scenario_id]

    @app.put("/scenarios/{scenario_id}")
    async def put_scenario(scenario_id: str, request: Request):
        config, err = await read_config(request)
        if err:
            return err
        scenarios[scenario_id] = config.model_dump(mode="json")
        return {"id": scenario_id}

    ui_dir = frontend_dir or os.environ.get("MTSRKIT_UI_DIR")
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
