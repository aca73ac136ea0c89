/** Pure view-model logic: fold the server's event stream and payloads into
 * what the panels render. No physics is derived client-side; everything
 * here reshapes numbers the API already provides. */

import type { AmbiguityItem, LedgerEntry, SessionEvent, SessionStatus } from "./api.js";

export interface StepPoint {
  t: number;
  dt: number;
  accepted: boolean;
  iterations?: number;
  mbWater?: number;
  mbOil?: number;
  cumulativeInjection?: number;
}

export interface MonitorModel {
  steps: StepPoint[];
  cuts: number;
  reports: number[];
  terminal: { kind: "done" | "failed"; certificate?: boolean; detail?: unknown } | null;
  lastEventId: number;
}

export function emptyMonitor(): MonitorModel {
  return { steps: [], cuts: 0, reports: [], terminal: null, lastEventId: -1 };
}

/** Fold a diagnostics page into the monitor model (append-only; pages must
 * arrive in id order, which `since` polling guarantees). */
export function foldEvents(model: MonitorModel, events: SessionEvent[]): MonitorModel {
  const out: MonitorModel = {
    steps: [...model.steps],
    cuts: model.cuts,
    reports: [...model.reports],
    terminal: model.terminal,
    lastEventId: model.lastEventId,
  };
  for (const ev of events) {
    if (ev.event_id <= out.lastEventId) continue;
    out.lastEventId = ev.event_id;
    if (ev.kind === "diagnostics") {
      const p = ev.payload as Record<string, unknown>;
      if (p["kind"] === "step") {
        const accepted = Boolean(p["accepted"]);
        if (!accepted) out.cuts += 1;
        out.steps.push({
          t: Number(p["t"]),
          dt: Number(p["dt"]),
          accepted,
          iterations: p["iterations"] as number | undefined,
          mbWater: p["mb_water"] as number | undefined,
          mbOil: p["mb_oil"] as number | undefined,
          cumulativeInjection: p["cumulative_injection"] as number | undefined,
        });
      } else if (p["kind"] === "report") {
        out.reports.push(Number(p["t"]));
      }
    } else if (ev.kind === "done") {
      out.terminal = { kind: "done", certificate: Boolean(ev.payload["certificate"]) };
    } else if (ev.kind === "failed") {
      out.terminal = { kind: "failed", detail: ev.payload };
    }
  }
  return out;
}

export type LedgerGroups = {
  user_explicit: LedgerEntry[];
  agent_default: LedgerEntry[];
  simulator_default: LedgerEntry[];
};

export const PROVENANCE_ORDER: (keyof LedgerGroups)[] = [
  "user_explicit",
  "agent_default",
  "simulator_default",
];

export function groupLedger(entries: LedgerEntry[]): LedgerGroups {
  const groups: LedgerGroups = { user_explicit: [], agent_default: [], simulator_default: [] };
  for (const entry of entries) {
    const bucket = groups[entry.provenance as keyof LedgerGroups];
    if (bucket) bucket.push(entry);
  }
  return groups;
}

export interface ClarificationModel {
  pending: AmbiguityItem[];
  /** drafts the user edited but has not submitted, keyed by checklist key */
  drafts: Record<string, string>;
  error: string | null;
}

export function clarificationAfterAnswer(
  model: ClarificationModel,
  remaining: string[],
): ClarificationModel {
  const keep = new Set(remaining);
  return {
    pending: model.pending.filter((item) => keep.has(item.key)),
    drafts: Object.fromEntries(
      Object.entries(model.drafts).filter(([key]) => keep.has(key)),
    ),
    error: null,
  };
}

export function parseDraft(text: string): unknown {
  return JSON.parse(text);
}

export type Banner =
  | { kind: "idle"; text: string }
  | { kind: "clarify"; text: string }
  | { kind: "running"; text: string }
  | { kind: "certified"; text: string }
  | { kind: "failed"; text: string };

export function banner(status: SessionStatus): Banner {
  if (status.running) return { kind: "running", text: "run in progress" };
  if (status.phase === "done" && status.certificate) {
    return {
      kind: "certified",
      text: "validity certificate: schedule completed, all step tolerances met",
    };
  }
  if (status.phase === "failed") {
    return { kind: "failed", text: `failed: ${status.failure?.reason ?? "unknown"}` };
  }
  if (status.phase === "clarify") {
    return { kind: "clarify", text: `${status.pending_count} decision(s) awaiting your answer` };
  }
  return { kind: "idle", text: status.phase };
}

/** Producer water cut series from the rates payload (pure reshaping). */
export function waterCutSeries(
  wellNames: string[],
  pvi: number[],
  ratesWater: number[][],
  ratesOil: number[][],
): { name: string; points: [number, number][] }[] {
  const producers = wellNames
    .map((name, idx) => ({ name, idx }))
    .filter(({ name }) => name.startsWith("P"));
  return producers.map(({ name, idx }) => ({
    name,
    points: pvi.map((x, step) => {
      const qw = -(ratesWater[step]?.[idx] ?? 0);
      const qo = -(ratesOil[step]?.[idx] ?? 0);
      const total = qw + qo;
      return [x, total > 0 ? qw / total : 0] as [number, number];
    }),
  }));
}
