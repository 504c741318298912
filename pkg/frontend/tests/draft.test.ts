import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  canSubmit,
  draftFromJson,
  editScenario,
  exportJson,
  issuesFor,
  materializePlan,
} from "../src/draft.js";

const FIXTURES = join(__dirname, "fixtures");
const referenceText = readFileSync(join(FIXTURES, "reference_scenario.json"), "utf8");

describe("scenario drafts", () => {
  it("valid edit marks the draft dirty and keeps it submittable", () => {
    let draft = draftFromJson("reference", referenceText);
    draft = editScenario(draft, "robots.count", 20);
    expect(draft.dirty.has("robots.count")).toBe(true);
    expect(canSubmit(draft)).toBe(true);
  });

  it("negative speed shows an inline error and disables submit", () => {
    let draft = draftFromJson("reference", referenceText);
    draft = editScenario(draft, "kinematics.speed_mps", -1);
    expect(canSubmit(draft)).toBe(false);
    expect(issuesFor(draft, "kinematics.speed_mps").length).toBeGreaterThan(0);
    // fixing the field re-enables submission
    draft = editScenario(draft, "kinematics.speed_mps", 0.5);
    expect(canSubmit(draft)).toBe(true);
  });

  it("policy switch to cr stays valid", () => {
    let draft = draftFromJson("reference", referenceText);
    draft = editScenario(draft, "policy", "cr");
    expect(canSubmit(draft)).toBe(true);
    expect(draft.values.policy).toBe("cr");
  });

  it("unknown paths are rejected", () => {
    const draft = draftFromJson("reference", referenceText);
    expect(() => editScenario(draft, "robots.turbo", 1)).toThrow(/unknown field path/);
  });

  it("exports the edited scenario byte-identically to the server's canonical form", () => {
    // the fixture was produced by the backend: robots.count=24, policy=cr
    let draft = draftFromJson("reference", referenceText);
    draft = editScenario(draft, "robots.count", 24);
    draft = editScenario(draft, "policy", "cr");
    const expected = readFileSync(join(FIXTURES, "edited_scenario.json"), "utf8");
    expect(exportJson(draft)).toBe(expected);
  });

  it("materializes a plan into a new draft", () => {
    const draft = draftFromJson("reference", referenceText);
    const plan = { n_robots: 13, n_chargers: 6, workers_by_station: [2, 1, 1] };
    const next = materializePlan(draft, plan, "plan 13r");
    expect(next.label).toBe("plan 13r");
    expect(next.values.robots.count).toBe(13);
    expect(next.values.layout.charging.chargers).toBe(6);
    expect(next.values.layout.workstations.map((w) => w.workers)).toEqual([2, 1, 1]);
    expect(canSubmit(next)).toBe(true);
  });
});
