/**
 * Typed client for the performance service. All domain math happens server
 * side; this module only moves documents.
 */

import { ScenarioValues } from "./schema.js";

export interface AnalyticalMetrics {
  stable: boolean;
  tht_s: number;
  rho_r_pct: number;
  rho_w_pct: number;
  rho_c_pct: number;
  tht_o_s: number[];
  throughput_max_per_s: number;
  arrival_rate_per_s: number;
  [key: string]: unknown;
}

export interface ResultDocument {
  schema: string;
  scenario: Record<string, unknown>;
  analytical: AnalyticalMetrics | null;
  simulation: Record<string, unknown> | null;
  comparison: Record<string, unknown> | null;
  provenance: Record<string, unknown>;
}

export interface ApiFailure {
  status: number;
  errors: { loc: string; msg: string }[];
  payload: Record<string, unknown>;
}

export type SolveOutcome =
  | { ok: true; doc: ResultDocument }
  | { ok: false; failure: ApiFailure };

export interface PlanRow {
  policy: string;
  lambda_per_min: number;
  n_robots: number;
  n_chargers: number;
  n_workers: number;
  workers_by_station: number[];
  tht_a: number;
  rho_r_a: number;
  rho_w_a: number;
  rho_c_a: number;
}

async function failureFrom(response: Response): Promise<ApiFailure> {
  let payload: Record<string, unknown> = {};
  try {
    payload = (await response.json()) as Record<string, unknown>;
  } catch {
    payload = {};
  }
  const errors = (payload.errors as { loc: string; msg: string }[]) ?? [];
  return { status: response.status, errors, payload };
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async healthz(): Promise<{ status: string; version: string }> {
    const response = await fetch(this.url("/healthz"));
    return (await response.json()) as { status: string; version: string };
  }

  async solve(scenario: ScenarioValues): Promise<SolveOutcome> {
    const response = await fetch(this.url("/solve"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(scenario),
    });
    if (!response.ok) return { ok: false, failure: await failureFrom(response) };
    return { ok: true, doc: (await response.json()) as ResultDocument };
  }

  async startSimulation(scenario: ScenarioValues): Promise<{ job_id: string }> {
    const response = await fetch(this.url("/simulate"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(scenario),
    });
    if (!response.ok) throw await failureFrom(response);
    return (await response.json()) as { job_id: string };
  }

  async jobStatus(jobId: string): Promise<{ status: string; result: ResultDocument | null; error: string | null }> {
    const response = await fetch(this.url(`/jobs/${jobId}`));
    if (!response.ok) throw await failureFrom(response);
    return (await response.json()) as { status: string; result: ResultDocument | null; error: string | null };
  }

  /** Poll until the job leaves the queue; resolves with the result document. */
  async pollJob(jobId: string, intervalMs = 1000, timeoutMs = 600000): Promise<ResultDocument> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.jobStatus(jobId);
      if (status.status === "done" && status.result) return status.result;
      if (status.status === "failed") throw new Error(status.error ?? "simulation job failed");
      if (Date.now() > deadline) throw new Error("timed out waiting for the simulation job");
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }

  async optimize(
    scenario: ScenarioValues,
    params: { rates?: string; target?: number; max_robots?: number; max_chargers?: number; max_workers?: number } = {}
  ): Promise<{ plans: PlanRow[] }> {
    const query = new URLSearchParams();
    for (const [key, value] of Object.entries(params)) {
      if (value !== undefined) query.set(key, String(value));
    }
    const suffix = query.toString() ? `?${query.toString()}` : "";
    const response = await fetch(this.url(`/optimize${suffix}`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(scenario),
    });
    if (!response.ok) throw await failureFrom(response);
    return (await response.json()) as { plans: PlanRow[] };
  }

  async listScenarios(): Promise<string[]> {
    const response = await fetch(this.url("/scenarios"));
    const body = (await response.json()) as { scenarios: string[] };
    return body.scenarios;
  }

  async saveScenario(id: string, scenario: ScenarioValues): Promise<void> {
    const response = await fetch(this.url(`/scenarios/${id}`), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(scenario),
    });
    if (!response.ok) throw await failureFrom(response);
  }

  async loadScenario(id: string): Promise<Record<string, unknown>> {
    const response = await fetch(this.url(`/scenarios/${id}`));
    if (!response.ok) throw await failureFrom(response);
    return (await response.json()) as Record<string, unknown>;
  }
}
