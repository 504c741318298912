/**
 * DOM rendering for the console: draft editor cards, comparison cards, and
 * the plan panel. Pure render-from-state functions; events are delegated to
 * callbacks supplied by main.ts.
 */

import { PlanRow } from "./api.js";
import { ComparisonView, METRICS } from "./compare.js";
import { ScenarioDraft, canSubmit, issuesFor } from "./draft.js";

export interface EditorCallbacks {
  onEdit(draftIndex: number, path: string, raw: string, kind: "int" | "float" | "text"): void;
  onJsonApply(draftIndex: number, text: string): void;
  onDuplicate(draftIndex: number): void;
  onRemove(draftIndex: number): void;
  onPinBaseline(draftIndex: number): void;
  onExport(draftIndex: number): void;
}

const QUICK_FIELDS: { path: string; label: string; kind: "int" | "float" | "text" }[] = [
  { path: "robots.count", label: "robots", kind: "int" },
  { path: "robots.buffer_positions", label: "buffer positions", kind: "int" },
  { path: "policy", label: "policy (random|cr)", kind: "text" },
  { path: "orders.total_rate_per_min", label: "orders/min", kind: "float" },
  { path: "layout.charging.chargers", label: "chargers", kind: "int" },
  { path: "kinematics.speed_mps", label: "robot speed (m/s)", kind: "float" },
];

function getPath(values: unknown, path: string): unknown {
  let node: unknown = values;
  for (const part of path.split(".")) {
    if (node === null || typeof node !== "object") return undefined;
    node = (node as Record<string, unknown>)[part];
  }
  return node;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

export function renderDrafts(
  container: HTMLElement,
  drafts: ScenarioDraft[],
  baselineIndex: number,
  callbacks: EditorCallbacks
): void {
  container.replaceChildren();
  drafts.forEach((draft, index) => {
    const card = el("div", { class: "draft-card" });
    const title = el(
      "div",
      { class: "draft-title" },
      el("strong", {}, draft.label),
      index === baselineIndex ? el("span", { class: "badge" }, "baseline") : "",
      draft.dirty.size > 0 ? el("span", { class: "badge dirty" }, "edited") : ""
    );
    card.append(title);

    const fields = el("div", { class: "fields" });
    for (const field of QUICK_FIELDS) {
      const value = getPath(draft.values, field.path);
      const input = el("input", {
        value: value === null || value === undefined ? "" : String(value),
        "data-path": field.path,
      }) as HTMLInputElement;
      input.addEventListener("change", () =>
        callbacks.onEdit(index, field.path, input.value, field.kind)
      );
      const wrap = el("label", { class: "field" }, el("span", {}, field.label), input);
      const fieldIssues = issuesFor(draft, field.path);
      if (fieldIssues.length > 0) {
        wrap.append(el("div", { class: "field-error" }, fieldIssues[0].msg));
      }
      fields.append(wrap);
    }
    card.append(fields);

    const otherIssues = draft.issues.filter(
      (issue) => !QUICK_FIELDS.some((f) => issue.loc === f.path || issue.loc.startsWith(f.path + "."))
    );
    if (otherIssues.length > 0) {
      card.append(
        el(
          "div",
          { class: "issues" },
          ...otherIssues.map((issue) => el("div", { class: "field-error" }, `${issue.loc}: ${issue.msg}`))
        )
      );
    }

    const jsonArea = el("textarea", { class: "json-edit", rows: "6" }) as HTMLTextAreaElement;
    jsonArea.value = JSON.stringify(draft.values, null, 2);
    const applyBtn = el("button", {}, "apply JSON");
    applyBtn.addEventListener("click", () => callbacks.onJsonApply(index, jsonArea.value));
    const details = el("details", {}, el("summary", {}, "edit as JSON"), jsonArea, applyBtn);
    card.append(details);

    const actions = el("div", { class: "actions" });
    for (const [name, handler] of [
      ["pin baseline", () => callbacks.onPinBaseline(index)],
      ["duplicate", () => callbacks.onDuplicate(index)],
      ["export", () => callbacks.onExport(index)],
      ["remove", () => callbacks.onRemove(index)],
    ] as const) {
      const button = el("button", {}, name);
      button.addEventListener("click", handler);
      actions.append(button);
    }
    card.append(actions);
    if (!canSubmit(draft)) {
      card.append(el("div", { class: "blocked" }, "fix the highlighted fields to enable runs"));
    }
    container.append(card);
  });
}

export function renderComparison(
  container: HTMLElement,
  view: ComparisonView | null,
  pending: string | null
): void {
  container.replaceChildren();
  if (pending) {
    container.append(el("div", { class: "pending" }, pending));
    return;
  }
  if (!view) return;
  for (const card of view.cards) {
    const node = el("div", { class: card.baseline ? "result-card baseline" : "result-card" });
    node.append(el("div", { class: "draft-title" }, el("strong", {}, card.label)));
    if (card.error) {
      node.append(el("div", { class: "field-error" }, card.error));
    } else if (card.metrics) {
      const table = el("table", {});
      for (const { key, label } of METRICS) {
        const value = card.metrics[key];
        const delta = card.deltas?.[key];
        const deltaText = card.baseline || delta === undefined
          ? ""
          : ` (${delta >= 0 ? "+" : ""}${delta.toFixed(1)}% vs ${view.baselineLabel})`;
        table.append(
          el("tr", {}, el("td", {}, label), el("td", {}, `${value.toFixed(1)}${deltaText}`))
        );
      }
      node.append(table);
    }
    container.append(node);
  }
}

export interface PlanCallbacks {
  onRequestPlan(targetPct: number, maxRobots: number, maxChargers: number, maxWorkers: number): void;
  onMaterialize(plan: PlanRow): void;
}

export function renderPlanPanel(
  container: HTMLElement,
  plans: PlanRow[] | null,
  message: string | null,
  callbacks: PlanCallbacks
): void {
  container.replaceChildren();
  const target = el("input", { value: "90", size: "4" }) as HTMLInputElement;
  const maxRobots = el("input", { value: "48", size: "4" }) as HTMLInputElement;
  const maxChargers = el("input", { value: "10", size: "4" }) as HTMLInputElement;
  const maxWorkers = el("input", { value: "9", size: "4" }) as HTMLInputElement;
  const button = el("button", {}, "plan minimum resources");
  button.addEventListener("click", () =>
    callbacks.onRequestPlan(
      Number(target.value),
      Number(maxRobots.value),
      Number(maxChargers.value),
      Number(maxWorkers.value)
    )
  );
  container.append(
    el(
      "div",
      { class: "plan-controls" },
      el("label", {}, "target util % ", target),
      el("label", {}, "max robots ", maxRobots),
      el("label", {}, "max chargers ", maxChargers),
      el("label", {}, "max workers ", maxWorkers),
      button
    )
  );
  if (message) container.append(el("div", { class: "pending" }, message));
  if (plans && plans.length > 0) {
    const table = el("table", { class: "plan-table" });
    table.append(
      el(
        "tr",
        {},
        ...["orders/min", "robots", "chargers", "workers", "THT (s)", "rho_r %", ""].map((h) =>
          el("th", {}, h)
        )
      )
    );
    for (const plan of plans) {
      const useBtn = el("button", {}, "materialize");
      useBtn.addEventListener("click", () => callbacks.onMaterialize(plan));
      table.append(
        el(
          "tr",
          {},
          el("td", {}, plan.lambda_per_min.toFixed(2)),
          el("td", {}, String(plan.n_robots)),
          el("td", {}, String(plan.n_chargers)),
          el("td", {}, String(plan.n_workers)),
          el("td", {}, plan.tht_a.toFixed(1)),
          el("td", {}, plan.rho_r_a.toFixed(1)),
          el("td", {}, useBtn)
        )
      );
    }
    container.append(table);
  }
}
