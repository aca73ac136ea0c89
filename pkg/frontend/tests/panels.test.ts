import { describe, expect, it } from "vitest";

import type { AmbiguityItem, DiffReport, LedgerEntry } from "../src/api.js";
import { lineChart } from "../src/charts.js";
import { renderClarificationPanel, renderDiffViewer, renderLedger, renderMonitor } from "../src/panels.js";
import { banner, emptyMonitor, foldEvents, groupLedger } from "../src/state.js";

const item = (key: string): AmbiguityItem => ({
  key,
  description: `decide ${key}`,
  severity: "blocks-physics",
  divergence_prone: key === "density_closure",
  proposed_default: { kind: "constant_compressibility" },
  rationale: "a sensible default",
});

describe("clarification panel", () => {
  it("renders each pending item with its proposed default", () => {
    const html = renderClarificationPanel([item("density_closure"), item("porosity_spec")], null);
    expect(html).toContain("density_closure");
    expect(html).toContain("porosity_spec");
    expect(html).toContain("constant_compressibility");
    expect(html).toContain("divergence-prone");
    expect(html).toContain("accept-all");
  });

  it("shows emptiness explicitly", () => {
    const html = renderClarificationPanel([], null);
    expect(html).toContain('data-empty="true"');
    expect(html).toContain("No decisions pending");
  });

  it("surfaces inline errors", () => {
    const html = renderClarificationPanel([item("x")], "porosity mean in (0, 1)");
    expect(html).toContain("porosity mean in (0, 1)");
  });
});

describe("ledger browser", () => {
  const entry = (key: string, provenance: string): LedgerEntry => ({
    key, value: { v: 1 }, provenance, rationale: "why", timestamp: 0, event_id: 7,
  });

  it("renders the three provenance groups with counts", () => {
    const html = renderLedger(groupLedger([
      entry("a", "user_explicit"), entry("b", "agent_default"),
    ]));
    expect(html).toContain("User explicit");
    expect(html).toContain("Agent default");
    expect(html).toContain("Simulator default (tacit)");
    expect(html).toContain("(1)");
    expect(html).toContain("(0)");
  });

  it("flags a populated tacit group", () => {
    const html = renderLedger(groupLedger([entry("c", "simulator_default")]));
    expect(html).toContain("simulator_default flagged");
    expect(html).toContain('data-event="7"');
  });
});

describe("run monitor", () => {
  it("shows the certificate banner and totals", () => {
    const model = foldEvents(emptyMonitor(), [
      { event_id: 0, kind: "diagnostics", payload: { kind: "step", t: 1, dt: 1, accepted: true, iterations: 2, mb_water: 1e-9 }, payload_hash: "", timestamp: 0 },
      { event_id: 1, kind: "done", payload: { certificate: true }, payload_hash: "", timestamp: 0 },
    ]);
    const status = {
      id: "s", phase: "done", revision: 0, running: false, pending_count: 0,
      config_hash: "h", certificate: true, failure: null,
    };
    const html = renderMonitor(model, status, banner(status));
    expect(html).toContain('data-kind="certified"');
    expect(html).toContain("steps: 1");
    expect(html).toContain("<svg");
  });
});

describe("diff viewer", () => {
  it("highlights differing rows with attribution", () => {
    const report: DiffReport = {
      closures: {
        density_closure: {
          status: "differs",
          reference: { c: 1e-8 },
          candidate: { c: 1e-10 },
          attribution: { provenance: "agent_default", rationale: "r", event_id: null },
        },
        gravity: { status: "equal" },
      },
      geometry: { pore_volume_delta_rel: 0.01 },
      fields: { hash_equal: { permeability: true, porosity: true } },
      wells: {},
      responses: { rate_water_l1_rel: 0.005, avg_pressure_l1_rel: 0.04 },
      differing_keys: ["density_closure"],
      all_equal: false,
    };
    const html = renderDiffViewer(report);
    expect(html).toContain('class="differs"');
    expect(html).toContain("Agent default");
    expect(html).not.toContain("equal-badge");
  });

  it("shows the all-equal badge on self-diffs", () => {
    const report: DiffReport = {
      closures: { gravity: { status: "equal" } },
      geometry: { pore_volume_delta_rel: 0 },
      fields: { hash_equal: { permeability: true, porosity: true } },
      wells: {},
      responses: { rate_water_l1_rel: 0, avg_pressure_l1_rel: 0 },
      differing_keys: [],
      all_equal: true,
    };
    expect(renderDiffViewer(report)).toContain("all equal");
  });
});

describe("lineChart", () => {
  it("produces polylines within the viewBox", () => {
    const svg = lineChart([
      { label: "dt", points: [[0, 1], [1, 2], [2, 4]] },
    ], { xLabel: "step", yLabel: "dt" });
    expect(svg).toContain("<svg");
    expect(svg).toContain("polyline");
    expect(svg).toContain("step");
    const coords = [...svg.matchAll(/points="([^"]+)"/g)][0]![1]!
      .split(" ").map((pair) => pair.split(",").map(Number));
    for (const [x, y] of coords) {
      expect(x).toBeGreaterThanOrEqual(0);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(460);
      expect(y).toBeLessThanOrEqual(220);
    }
  });

  it("handles log scale for dt series", () => {
    const svg = lineChart([{ label: "dt", points: [[0, 1e2], [1, 1e6]] }], { logY: true });
    expect(svg).toContain("polyline");
  });
});
