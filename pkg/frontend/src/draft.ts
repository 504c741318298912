/**
 * Editable scenario drafts: field edits, dirty tracking, inline validation.
 * Submission is gated on an empty validation list.
 */

import { ScenarioValues, ValidationIssue, canonicalize, normalize, validate } from "./schema.js";

export interface ScenarioDraft {
  label: string;
  values: ScenarioValues;
  dirty: Set<string>;
  issues: ValidationIssue[];
}

export function draftFromJson(label: string, text: string): ScenarioDraft {
  const values = normalize(JSON.parse(text) as Record<string, unknown>);
  return {
    label,
    values,
    dirty: new Set(),
    issues: validate(values as unknown as Record<string, unknown>),
  };
}

function cloneValues(values: ScenarioValues): ScenarioValues {
  return JSON.parse(JSON.stringify(values)) as ScenarioValues;
}

function setPath(target: Record<string, unknown>, path: string, value: unknown) {
  const parts = path.split(".");
  let node: Record<string, unknown> = target;
  for (const part of parts.slice(0, -1)) {
    const next = node[part];
    if (next === undefined || next === null || typeof next !== "object") {
      throw new Error(`unknown field path: ${path}`);
    }
    node = next as Record<string, unknown>;
  }
  const leaf = parts[parts.length - 1];
  if (!(leaf in node) && !Array.isArray(node)) {
    throw new Error(`unknown field path: ${path}`);
  }
  node[leaf] = value;
}

/** Apply one field edit; returns a new draft with refreshed validation. */
export function editScenario(draft: ScenarioDraft, path: string, value: unknown): ScenarioDraft {
  const values = cloneValues(draft.values);
  setPath(values as unknown as Record<string, unknown>, path, value);
  const dirty = new Set(draft.dirty);
  dirty.add(path);
  return {
    label: draft.label,
    values,
    dirty,
    issues: validate(values as unknown as Record<string, unknown>),
  };
}

export function canSubmit(draft: ScenarioDraft): boolean {
  return draft.issues.length === 0;
}

export function issuesFor(draft: ScenarioDraft, path: string): ValidationIssue[] {
  return draft.issues.filter((issue) => issue.loc === path || issue.loc.startsWith(path + "."));
}

/** Canonical JSON export; identical bytes to the server's echo of the same scenario. */
export function exportJson(draft: ScenarioDraft): string {
  return canonicalize(draft.values);
}

export interface PlanSummary {
  n_robots: number;
  n_chargers: number;
  workers_by_station: number[];
}

/** Turn a plan's resource counts into a new editable draft. */
export function materializePlan(draft: ScenarioDraft, plan: PlanSummary, label: string): ScenarioDraft {
  let next: ScenarioDraft = { ...draft, label, dirty: new Set(draft.dirty) };
  next = editScenario(next, "robots.count", plan.n_robots);
  next = editScenario(next, "layout.charging.chargers", plan.n_chargers);
  plan.workers_by_station.forEach((workers, i) => {
    next = editScenario(next, `layout.workstations.${i}.workers`, workers);
  });
  return { ...next, label };
}
