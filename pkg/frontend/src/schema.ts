/**
 * Client-side mirror of the server's scenario schema.
 *
 * Validation reproduces the server's rules and error shape ({loc, msg} with
 * dotted field paths) so problems surface inline before any request is made.
 * The canonical serializer reproduces the server's sorted-key, 2-space-indent
 * JSON byte for byte, including trailing ".0" on float-typed fields, so a
 * scenario exported here parses and re-serializes identically through the
 * CLI.
 */

export interface ValidationIssue {
  loc: string;
  msg: string;
}

export type Policy = "random" | "cr";
export type Side = "west" | "south" | "east" | "north";

export interface ScenarioValues {
  layout: {
    blocks: [number, number];
    shelf_rows: number;
    shelf_cols: number;
    cell_pitch_m: number;
    workstations: { side: Side; workers: number; offset: number | null }[];
    charging: { side: Side; chargers: number; offset: number | null };
  };
  kinematics: { speed_mps: number; pick_time_s: number };
  orders: {
    classes: { lines: number; rate_per_min: number | null; probability: number | null }[];
    total_rate_per_min: number | null;
  };
  robots: { count: number; buffer_positions: number };
  handling_time_s: { min_s: number; max_s: number };
  charging_time_s: { min_s: number; max_s: number };
  energy: { charge_threshold_pct: number; depletion_pct_per_min: number };
  policy: Policy;
  storage_policy: Policy | null;
  seeds: { travel: number; simulation: number };
  monte_carlo: { min_samples: number; max_episodes: number };
  simulation: { replications: number; horizon_hours: number; warmup_hours: number | null };
}

const SIDES: Side[] = ["west", "south", "east", "north"];
const POLICIES: Policy[] = ["random", "cr"];
const PROB_TOL = 1e-9;

/** Leaf fields the server types as floats (serialized with a decimal point). */
const FLOAT_FIELDS = new Set([
  "cell_pitch_m",
  "speed_mps",
  "pick_time_s",
  "rate_per_min",
  "probability",
  "total_rate_per_min",
  "min_s",
  "max_s",
  "charge_threshold_pct",
  "depletion_pct_per_min",
  "horizon_hours",
  "warmup_hours",
]);

export function defaultSections(): Pick<ScenarioValues, "seeds" | "monte_carlo" | "simulation"> {
  return {
    seeds: { travel: 1, simulation: 20240001 },
    monte_carlo: { min_samples: 1000, max_episodes: 500000 },
    simulation: { replications: 5, horizon_hours: 200.0, warmup_hours: null },
  };
}

/** Fill optional sections exactly like the server's parse does. */
export function normalize(raw: Record<string, unknown>): ScenarioValues {
  const defaults = defaultSections();
  const value = { ...raw } as Record<string, unknown>;
  value.storage_policy = raw.storage_policy ?? null;
  value.seeds = { ...defaults.seeds, ...((raw.seeds as object) ?? {}) };
  value.monte_carlo = { ...defaults.monte_carlo, ...((raw.monte_carlo as object) ?? {}) };
  value.simulation = { ...defaults.simulation, ...((raw.simulation as object) ?? {}) };
  const orders = raw.orders as Record<string, unknown> | undefined;
  if (orders) {
    value.orders = {
      total_rate_per_min: orders.total_rate_per_min ?? null,
      classes: ((orders.classes as Record<string, unknown>[]) ?? []).map((c) => ({
        lines: c.lines,
        rate_per_min: c.rate_per_min ?? null,
        probability: c.probability ?? null,
      })),
    };
  }
  const layout = raw.layout as Record<string, unknown> | undefined;
  if (layout) {
    value.layout = {
      ...layout,
      workstations: ((layout.workstations as Record<string, unknown>[]) ?? []).map((w) => ({
        side: w.side,
        workers: w.workers,
        offset: w.offset ?? null,
      })),
      charging: layout.charging
        ? {
            side: (layout.charging as Record<string, unknown>).side,
            chargers: (layout.charging as Record<string, unknown>).chargers,
            offset: (layout.charging as Record<string, unknown>).offset ?? null,
          }
        : layout.charging,
    };
  }
  return value as unknown as ScenarioValues;
}

function isInt(v: unknown): v is number {
  return typeof v === "number" && Number.isInteger(v);
}

function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

const SECTION_KEYS: Record<string, string[]> = {
  "": [
    "layout", "kinematics", "orders", "robots", "handling_time_s",
    "charging_time_s", "energy", "policy", "storage_policy", "seeds",
    "monte_carlo", "simulation",
  ],
  layout: ["blocks", "shelf_rows", "shelf_cols", "cell_pitch_m", "workstations", "charging"],
  kinematics: ["speed_mps", "pick_time_s"],
  orders: ["classes", "total_rate_per_min"],
  robots: ["count", "buffer_positions"],
  handling_time_s: ["min_s", "max_s"],
  charging_time_s: ["min_s", "max_s"],
  energy: ["charge_threshold_pct", "depletion_pct_per_min"],
  seeds: ["travel", "simulation"],
  monte_carlo: ["min_samples", "max_episodes"],
  simulation: ["replications", "horizon_hours", "warmup_hours"],
};

function checkUnknownKeys(obj: Record<string, unknown>, section: string, issues: ValidationIssue[]) {
  const allowed = SECTION_KEYS[section];
  if (!allowed) return;
  for (const key of Object.keys(obj)) {
    if (!allowed.includes(key)) {
      issues.push({ loc: section ? `${section}.${key}` : key, msg: "extra fields not permitted" });
    }
  }
}

export function validate(values: Record<string, unknown>): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  const push = (loc: string, msg: string) => issues.push({ loc, msg });
  checkUnknownKeys(values, "", issues);

  const v = values as Partial<ScenarioValues> & Record<string, unknown>;

  const layout = v.layout;
  if (!layout) push("layout", "field required");
  else {
    checkUnknownKeys(layout as unknown as Record<string, unknown>, "layout", issues);
    if (
      !Array.isArray(layout.blocks) || layout.blocks.length !== 2 ||
      !layout.blocks.every((b) => isInt(b) && b >= 1)
    ) {
      push("layout.blocks", "two block counts >= 1 required");
    }
    if (!isInt(layout.shelf_rows) || layout.shelf_rows < 1) push("layout.shelf_rows", "must be an integer >= 1");
    if (!isInt(layout.shelf_cols) || layout.shelf_cols < 1) push("layout.shelf_cols", "must be an integer >= 1");
    if (!isNum(layout.cell_pitch_m) || layout.cell_pitch_m <= 0) push("layout.cell_pitch_m", "must be greater than 0");
    if (!Array.isArray(layout.workstations) || layout.workstations.length < 1) {
      push("layout.workstations", "at least one workstation required");
    } else {
      layout.workstations.forEach((w, i) => {
        if (!SIDES.includes(w.side)) push(`layout.workstations.${i}.side`, "unknown side");
        if (!isInt(w.workers) || w.workers < 1) push(`layout.workstations.${i}.workers`, "must be an integer >= 1");
      });
    }
    if (!layout.charging) push("layout.charging", "field required");
    else {
      if (!SIDES.includes(layout.charging.side)) push("layout.charging.side", "unknown side");
      if (!isInt(layout.charging.chargers) || layout.charging.chargers < 1) {
        push("layout.charging.chargers", "must be an integer >= 1");
      }
    }
  }

  const kin = v.kinematics;
  if (!kin) push("kinematics", "field required");
  else {
    checkUnknownKeys(kin as unknown as Record<string, unknown>, "kinematics", issues);
    if (!isNum(kin.speed_mps) || kin.speed_mps <= 0) push("kinematics.speed_mps", "must be greater than 0");
    if (!isNum(kin.pick_time_s) || kin.pick_time_s < 0) push("kinematics.pick_time_s", "must be >= 0");
  }

  const orders = v.orders;
  if (!orders) push("orders", "field required");
  else {
    checkUnknownKeys(orders as unknown as Record<string, unknown>, "orders", issues);
    const classes = orders.classes ?? [];
    if (!Array.isArray(classes) || classes.length < 1) push("orders.classes", "at least one class required");
    else {
      const withProb = classes.filter((c) => c.probability != null);
      const withRate = classes.filter((c) => c.rate_per_min != null);
      classes.forEach((c, i) => {
        if (!isInt(c.lines) || c.lines < 1) push(`orders.classes.${i}.lines`, "must be an integer >= 1");
        const hasRate = c.rate_per_min != null;
        const hasProb = c.probability != null;
        if (hasRate === hasProb) {
          push(`orders.classes.${i}`, "give exactly one of rate_per_min or probability");
        }
        if (hasProb && (!isNum(c.probability) || c.probability! <= 0 || c.probability! > 1)) {
          push(`orders.classes.${i}.probability`, "must lie in (0, 1]");
        }
        if (hasRate && (!isNum(c.rate_per_min) || c.rate_per_min! <= 0)) {
          push(`orders.classes.${i}.rate_per_min`, "must be greater than 0");
        }
      });
      if (withProb.length > 0 && withProb.length !== classes.length) {
        push("orders.classes", "mix of probability and rate_per_min class forms");
      } else if (withProb.length === classes.length) {
        if (orders.total_rate_per_min == null) {
          push("orders.total_rate_per_min", "probability form needs total_rate_per_min");
        }
        const total = withProb.reduce((s, c) => s + (c.probability ?? 0), 0);
        if (Math.abs(total - 1.0) > PROB_TOL) {
          push("orders.classes", `class probabilities sum to ${total}, expected 1`);
        }
      } else if (withRate.length === classes.length && orders.total_rate_per_min != null) {
        push("orders.total_rate_per_min", "only applies to the probability form");
      }
      const lines = classes.map((c) => c.lines);
      if (new Set(lines).size !== lines.length) push("orders.classes", "duplicate line counts across classes");
    }
    if (orders.total_rate_per_min != null && (!isNum(orders.total_rate_per_min) || orders.total_rate_per_min <= 0)) {
      push("orders.total_rate_per_min", "must be greater than 0");
    }
  }

  const robots = v.robots;
  if (!robots) push("robots", "field required");
  else {
    checkUnknownKeys(robots as unknown as Record<string, unknown>, "robots", issues);
    if (!isInt(robots.count) || robots.count < 1) push("robots.count", "must be an integer >= 1");
    if (!isInt(robots.buffer_positions) || robots.buffer_positions < 1) {
      push("robots.buffer_positions", "must be an integer >= 1");
    }
  }

  for (const section of ["handling_time_s", "charging_time_s"] as const) {
    const interval = v[section];
    if (!interval) push(section, "field required");
    else {
      checkUnknownKeys(interval as unknown as Record<string, unknown>, section, issues);
      if (!isNum(interval.min_s) || interval.min_s < 0) push(`${section}.min_s`, "must be >= 0");
      if (!isNum(interval.max_s) || interval.max_s <= 0) push(`${section}.max_s`, "must be greater than 0");
      if (isNum(interval.min_s) && isNum(interval.max_s) && interval.min_s > interval.max_s) {
        push(`${section}.min_s`, "min_s must not exceed max_s");
      }
    }
  }

  const energy = v.energy;
  if (!energy) push("energy", "field required");
  else {
    checkUnknownKeys(energy as unknown as Record<string, unknown>, "energy", issues);
    if (!isNum(energy.charge_threshold_pct) || energy.charge_threshold_pct < 0 || energy.charge_threshold_pct >= 100) {
      push("energy.charge_threshold_pct", "must lie in [0, 100)");
    }
    if (!isNum(energy.depletion_pct_per_min) || energy.depletion_pct_per_min < 0) {
      push("energy.depletion_pct_per_min", "must be >= 0");
    }
  }

  if (!POLICIES.includes(v.policy as Policy)) push("policy", "must be 'random' or 'cr'");
  if (v.storage_policy != null && !POLICIES.includes(v.storage_policy as Policy)) {
    push("storage_policy", "must be 'random' or 'cr'");
  }

  const sim = v.simulation;
  if (sim) {
    checkUnknownKeys(sim as unknown as Record<string, unknown>, "simulation", issues);
    if (!isInt(sim.replications) || sim.replications < 1) push("simulation.replications", "must be an integer >= 1");
    if (!isNum(sim.horizon_hours) || sim.horizon_hours <= 0) push("simulation.horizon_hours", "must be greater than 0");
    if (sim.warmup_hours != null && isNum(sim.horizon_hours) && sim.warmup_hours >= sim.horizon_hours) {
      push("simulation.warmup_hours", "must be smaller than horizon_hours");
    }
  }
  return issues;
}

/** Python-repr float formatting: integral floats keep a trailing ".0". */
function floatRepr(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e16) return `${x}.0`;
  return String(x);
}

function serialize(value: unknown, key: string | null, indent: number): string {
  const pad = "  ".repeat(indent);
  const padInner = "  ".repeat(indent + 1);
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") {
    return key !== null && FLOAT_FIELDS.has(key) ? floatRepr(value) : String(value);
  }
  if (typeof value === "string") return JSON.stringify(value);
  if (Array.isArray(value)) {
    if (value.length === 0) return "[]";
    const items = value.map((item) => padInner + serialize(item, key, indent + 1));
    return "[\n" + items.join(",\n") + "\n" + pad + "]";
  }
  const obj = value as Record<string, unknown>;
  const keys = Object.keys(obj).sort();
  if (keys.length === 0) return "{}";
  const items = keys.map(
    (k) => `${padInner}${JSON.stringify(k)}: ${serialize(obj[k], k, indent + 1)}`
  );
  return "{\n" + items.join(",\n") + "\n" + pad + "}";
}

/** Sorted-key 2-space-indent JSON, byte-identical to the server's echo. */
export function canonicalize(values: ScenarioValues): string {
  return serialize(values, null, 0) + "\n";
}
