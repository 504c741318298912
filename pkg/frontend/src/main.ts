/** Console wiring: drafts, compare runs, and the plan panel. */

import { ApiClient, ApiFailure, PlanRow } from "./api.js";
import { CompareEntry, buildComparison } from "./compare.js";
import {
  ScenarioDraft,
  canSubmit,
  draftFromJson,
  editScenario,
  exportJson,
  materializePlan,
} from "./draft.js";
import { renderComparison, renderDrafts, renderPlanPanel } from "./ui.js";

const api = new ApiClient("");

const state = {
  drafts: [] as ScenarioDraft[],
  baselineIndex: 0,
  view: null as ReturnType<typeof buildComparison> | null,
  pending: null as string | null,
  plans: null as PlanRow[] | null,
  planMessage: null as string | null,
};

const draftsEl = document.getElementById("drafts")!;
const compareEl = document.getElementById("comparison")!;
const planEl = document.getElementById("plan-panel")!;
const runButton = document.getElementById("run-compare") as HTMLButtonElement;

function redraw() {
  renderDrafts(draftsEl, state.drafts, state.baselineIndex, {
    onEdit(index, path, raw, kind) {
      let value: unknown = raw;
      if (kind === "int") value = raw === "" ? null : Number.parseInt(raw, 10);
      if (kind === "float") value = raw === "" ? null : Number(raw);
      if ((kind === "int" || kind === "float") && Number.isNaN(value)) value = raw;
      state.drafts[index] = editScenario(state.drafts[index], path, value);
      redraw();
    },
    onJsonApply(index, text) {
      try {
        state.drafts[index] = draftFromJson(state.drafts[index].label, text);
      } catch (err) {
        alert(`invalid JSON: ${err}`);
      }
      redraw();
    },
    onDuplicate(index) {
      const source = state.drafts[index];
      const copy = draftFromJson(`${source.label} copy`, JSON.stringify(source.values));
      state.drafts.splice(index + 1, 0, copy);
      redraw();
    },
    onRemove(index) {
      if (state.drafts.length <= 1) return;
      state.drafts.splice(index, 1);
      if (state.baselineIndex >= state.drafts.length) state.baselineIndex = 0;
      redraw();
    },
    onPinBaseline(index) {
      state.baselineIndex = index;
      redraw();
    },
    onExport(index) {
      const blob = new Blob([exportJson(state.drafts[index])], { type: "application/json" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `${state.drafts[index].label.replaceAll(" ", "_")}.json`;
      link.click();
      URL.revokeObjectURL(link.href);
    },
  });
  renderComparison(compareEl, state.view, state.pending);
  renderPlanPanel(planEl, state.plans, state.planMessage, {
    async onRequestPlan(targetPct, maxRobots, maxChargers, maxWorkers) {
      const draft = state.drafts[state.baselineIndex];
      if (!canSubmit(draft)) return;
      state.planMessage = "searching the resource grid...";
      state.plans = null;
      redraw();
      try {
        const result = await api.optimize(draft.values, {
          target: targetPct,
          max_robots: maxRobots,
          max_chargers: maxChargers,
          max_workers: maxWorkers,
        });
        state.plans = result.plans;
        state.planMessage = null;
      } catch (err) {
        state.plans = null;
        state.planMessage =
          (err as ApiFailure).errors?.map((e) => e.msg).join("; ") ??
          "planning request failed";
      }
      redraw();
    },
    onMaterialize(plan) {
      const base = state.drafts[state.baselineIndex];
      const label = `plan ${plan.n_robots}r/${plan.n_chargers}c/${plan.n_workers}w`;
      state.drafts.push(materializePlan(base, plan, label));
      redraw();
    },
  });
  runButton.disabled = !state.drafts.some(canSubmit);
}

async function runAndCompare() {
  const runnable = state.drafts.map((draft, index) => ({ draft, index }));
  if (!runnable.some(({ draft }) => canSubmit(draft))) return;
  const usesMonteCarlo = runnable.some(({ draft }) => draft.values.policy === "cr");
  state.pending = usesMonteCarlo
    ? "solving... (closest-retrieval travel times are sampled by Monte Carlo)"
    : "solving...";
  state.view = null;
  redraw();
  const entries: CompareEntry[] = await Promise.all(
    runnable.map(async ({ draft }): Promise<CompareEntry> => {
      if (!canSubmit(draft)) {
        return {
          label: draft.label,
          failure: { status: 0, errors: draft.issues, payload: {} },
        };
      }
      const outcome = await api.solve(draft.values);
      return outcome.ok
        ? { label: draft.label, doc: outcome.doc }
        : { label: draft.label, failure: outcome.failure };
    })
  );
  state.pending = null;
  let baselineEntry = state.baselineIndex;
  if (!entries[baselineEntry]?.doc) {
    baselineEntry = entries.findIndex((entry) => entry.doc);
  }
  if (baselineEntry < 0) {
    state.view = null;
    state.pending = "no draft produced a stable result; see the cards above";
  } else {
    state.view = buildComparison(entries, baselineEntry);
  }
  redraw();
}

async function boot() {
  const response = await fetch("/ui/reference_scenario.json").catch(() => null);
  let text: string;
  if (response && response.ok) {
    text = await response.text();
  } else {
    const stored = await api.loadScenario("reference").catch(() => null);
    text = stored ? JSON.stringify(stored) : "";
  }
  if (!text) {
    draftsEl.textContent =
      "no reference scenario available; PUT one to /scenarios/reference or place " +
      "reference_scenario.json next to the console";
    return;
  }
  state.drafts = [draftFromJson("reference", text)];
  runButton.addEventListener("click", () => void runAndCompare());
  redraw();
}

void boot();
