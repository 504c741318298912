/**
 * Side-by-side comparison of solve results against a pinned baseline.
 *
 * Every metric value comes verbatim from a server result document; the only
 * arithmetic here is the percentage delta between displayed values.
 */

import { ApiFailure, ResultDocument } from "./api.js";

export const METRICS = [
  { key: "tht_s", label: "order throughput time (s)" },
  { key: "rho_r_pct", label: "robot utilization (%)" },
  { key: "rho_w_pct", label: "worker utilization (%)" },
  { key: "rho_c_pct", label: "charger utilization (%)" },
] as const;

export type MetricKey = (typeof METRICS)[number]["key"];

export interface CardMetrics {
  tht_s: number;
  rho_r_pct: number;
  rho_w_pct: number;
  rho_c_pct: number;
}

export interface ComparisonCard {
  label: string;
  baseline: boolean;
  metrics: CardMetrics | null;
  deltas: Partial<Record<MetricKey, number>> | null;
  error: string | null;
}

export interface ComparisonView {
  baselineLabel: string;
  cards: ComparisonCard[];
}

export interface CompareEntry {
  label: string;
  doc?: ResultDocument;
  failure?: ApiFailure;
}

export function explainFailure(failure: ApiFailure): string {
  if (failure.status === 409) {
    const th = failure.payload.max_throughput_per_s as number | undefined;
    const lam = failure.payload.arrival_rate_per_s as number | undefined;
    if (th !== undefined && lam !== undefined) {
      return (
        `unstable: arrival rate ${(lam * 60).toFixed(2)}/min exceeds the maximum ` +
        `throughput ${(th * 60).toFixed(2)}/min`
      );
    }
    return "unstable configuration";
  }
  if (failure.errors.length > 0) {
    return failure.errors.map((e) => `${e.loc}: ${e.msg}`).join("; ");
  }
  return `request failed with status ${failure.status}`;
}

function metricsOf(doc: ResultDocument): CardMetrics {
  const a = doc.analytical;
  if (!a || !a.stable) throw new Error("document carries no stable analytical result");
  return {
    tht_s: a.tht_s,
    rho_r_pct: a.rho_r_pct,
    rho_w_pct: a.rho_w_pct,
    rho_c_pct: a.rho_c_pct,
  };
}

/** Build the card list; the baseline entry must have a result document. */
export function buildComparison(entries: CompareEntry[], baselineIndex = 0): ComparisonView {
  if (entries.length === 0) throw new Error("nothing to compare");
  const baseline = entries[baselineIndex];
  if (!baseline?.doc) throw new Error("the pinned baseline needs a solved document");
  const base = metricsOf(baseline.doc);
  const cards = entries.map((entry, index) => {
    if (!entry.doc) {
      return {
        label: entry.label,
        baseline: index === baselineIndex,
        metrics: null,
        deltas: null,
        error: entry.failure ? explainFailure(entry.failure) : "no result",
      };
    }
    const metrics = metricsOf(entry.doc);
    const deltas: Partial<Record<MetricKey, number>> = {};
    for (const { key } of METRICS) {
      deltas[key] = base[key] === 0 ? 0 : ((metrics[key] - base[key]) / base[key]) * 100;
    }
    return {
      label: entry.label,
      baseline: index === baselineIndex,
      metrics,
      deltas,
      error: null,
    };
  });
  return { baselineLabel: baseline.label, cards };
}
