import { describe, expect, it } from "vitest";

import type { LedgerEntry, SessionEvent, SessionStatus } from "../src/api.js";
import { banner, clarificationAfterAnswer, emptyMonitor, foldEvents, groupLedger, waterCutSeries } from "../src/state.js";

function ev(id: number, kind: string, payload: Record<string, unknown>): SessionEvent {
  return { event_id: id, kind, payload, payload_hash: "h", timestamp: 0 };
}

describe("foldEvents", () => {
  it("accumulates steps, cuts, reports and terminal state", () => {
    const events = [
      ev(0, "spec-received", {}),
      ev(1, "diagnostics", { kind: "step", t: 10, dt: 10, accepted: true, iterations: 3, mb_water: 1e-9, cumulative_injection: 5 }),
      ev(2, "diagnostics", { kind: "step", t: 10, dt: 20, accepted: false, failure: "max_iters" }),
      ev(3, "diagnostics", { kind: "step", t: 20, dt: 10, accepted: true, iterations: 2, mb_water: 2e-9, cumulative_injection: 10 }),
      ev(4, "diagnostics", { kind: "report", t: 20, index: 0 }),
      ev(5, "done", { certificate: true, config_hash: "abc" }),
    ];
    const model = foldEvents(emptyMonitor(), events);
    expect(model.steps).toHaveLength(3);
    expect(model.steps.filter((s) => s.accepted)).toHaveLength(2);
    expect(model.cuts).toBe(1);
    expect(model.reports).toEqual([20]);
    expect(model.terminal).toEqual({ kind: "done", certificate: true });
    expect(model.lastEventId).toBe(5);
  });

  it("is idempotent over replayed pages (incremental polling)", () => {
    const events = [
      ev(0, "spec-received", {}),
      ev(1, "diagnostics", { kind: "step", t: 1, dt: 1, accepted: true }),
    ];
    const once = foldEvents(emptyMonitor(), events);
    const twice = foldEvents(once, events); // same ids again: ignored
    expect(twice.steps).toHaveLength(1);
    expect(twice.lastEventId).toBe(1);
  });

  it("records failure terminal state", () => {
    const model = foldEvents(emptyMonitor(), [
      ev(0, "failed", { reason: "convergence_failure" }),
    ]);
    expect(model.terminal?.kind).toBe("failed");
  });
});

describe("groupLedger", () => {
  const entry = (key: string, provenance: string): LedgerEntry => ({
    key, value: 1, provenance, rationale: "", timestamp: 0, event_id: null,
  });

  it("groups into the three provenance buckets", () => {
    const groups = groupLedger([
      entry("a", "user_explicit"),
      entry("b", "agent_default"),
      entry("c", "simulator_default"),
      entry("d", "agent_default"),
    ]);
    expect(groups.user_explicit.map((e) => e.key)).toEqual(["a"]);
    expect(groups.agent_default.map((e) => e.key)).toEqual(["b", "d"]);
    expect(groups.simulator_default.map((e) => e.key)).toEqual(["c"]);
  });

  it("all groups exist even when empty", () => {
    const groups = groupLedger([]);
    expect(Object.keys(groups).sort()).toEqual(
      ["agent_default", "simulator_default", "user_explicit"]);
  });
});

describe("banner", () => {
  const base: SessionStatus = {
    id: "s", phase: "act", revision: 0, running: false, pending_count: 0,
    config_hash: null, certificate: false, failure: null,
  };

  it("certificate banner on done", () => {
    const b = banner({ ...base, phase: "done", certificate: true });
    expect(b.kind).toBe("certified");
    expect(b.text).toContain("certificate");
  });

  it("running takes precedence", () => {
    expect(banner({ ...base, running: true }).kind).toBe("running");
  });

  it("clarify shows pending count", () => {
    const b = banner({ ...base, phase: "clarify", pending_count: 3 });
    expect(b.kind).toBe("clarify");
    expect(b.text).toContain("3");
  });

  it("failure carries the reason", () => {
    const b = banner({ ...base, phase: "failed",
                       failure: { reason: "convergence_failure", detail: null } });
    expect(b.kind).toBe("failed");
    expect(b.text).toContain("convergence_failure");
  });
});

describe("clarificationAfterAnswer", () => {
  it("drops answered items and their drafts", () => {
    const model = {
      pending: [
        { key: "a", description: "", severity: "", divergence_prone: false, proposed_default: 1, rationale: "" },
        { key: "b", description: "", severity: "", divergence_prone: false, proposed_default: 2, rationale: "" },
      ],
      drafts: { a: "1", b: "2" },
      error: "old",
    };
    const next = clarificationAfterAnswer(model, ["b"]);
    expect(next.pending.map((i) => i.key)).toEqual(["b"]);
    expect(Object.keys(next.drafts)).toEqual(["b"]);
    expect(next.error).toBeNull();
  });
});

describe("waterCutSeries", () => {
  it("derives producer water cut from signed phase rates", () => {
    const series = waterCutSeries(
      ["I1", "P1"],
      [0.1, 0.2],
      [[0.01, -0.002], [0.01, -0.006]],
      [[0.0, -0.008], [0.0, -0.004]],
    );
    expect(series).toHaveLength(1);
    expect(series[0]?.name).toBe("P1");
    expect(series[0]?.points[0]?.[1]).toBeCloseTo(0.2, 12);
    expect(series[0]?.points[1]?.[1]).toBeCloseTo(0.6, 12);
  });
});
