/** Live-service contract test: spawns the Python HTTP service and drives
 * exactly the interactions the browser client performs, asserting the
 * view-model states the panels would render. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { renderClarificationPanel, renderLedger, renderMonitor } from "../src/panels.js";
import { banner, emptyMonitor, foldEvents, groupLedger } from "../src/state.js";

const PORT = 18731 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(__dirname, "..", "..");

let server: ChildProcess;
const api = new ApiClient(BASE);

function loadExample(name: string): Record<string, unknown> {
  const path = join(REPO_ROOT, "src", "groundloop", "assets", "examples", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8"));
}

function reportDomeSpec(): Record<string, unknown> {
  const doc = loadExample("dome_reservoir") as Record<string, any>;
  doc["meta"] = { title: "report-level dome", level: "report" };
  delete doc["sampling"];
  delete doc["solver"];
  doc["mesh"] = { ...doc["mesh"], nx: 8, ny: 8, nz: 3 };
  doc["wells"]["producers"]["placement"] = [[4, 4], [2, 5], [5, 2]];
  doc["schedule"]["n_report_steps"] = 4;
  return doc;
}

function fivespotSpec(): Record<string, unknown> {
  const doc = loadExample("fivespot") as Record<string, any>;
  // shrink the fixture so the live run finishes in seconds
  doc["mesh"] = { ...doc["mesh"], nx: 14, ny: 14 };
  doc["wells"]["producers"]["placement"] = [[13, 13]];
  doc["schedule"]["n_report_steps"] = 8;
  doc["solver"]["max_dt"] = "456.25 day";
  return doc;
}

async function waitForHealth(timeoutMs = 60_000): Promise<void> {
  const t0 = Date.now();
  while (Date.now() - t0 < timeoutMs) {
    try {
      const res = await fetch(`${BASE}/healthz`);
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  const store = mkdtempSync(join(tmpdir(), "groundloop-ui-"));
  server = spawn(
    "python3",
    ["-m", "groundloop.service.cli", "serve", "--port", String(PORT), "--store", store],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForHealth();
}, 90_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("clarification flow against the live service", () => {
  it("lists density_closure, accepts answers, and empties the list", async () => {
    const { id } = await api.createSession(reportDomeSpec(), "interactive");
    const { items } = await api.ambiguities(id);
    const keys = items.map((i) => i.key);
    expect(keys).toContain("density_closure");

    // the panel the user would see
    const panelHtml = renderClarificationPanel(items, null);
    expect(panelHtml).toContain("density_closure");

    // an inadmissible value surfaces inline with the violated invariant
    let inlineError = "";
    try {
      await api.postAnswers(id, {
        density_closure: {
          kind: "constant_compressibility",
          reference_pressure: 1.5e7,
          compressibility: { water: -1, oil: 0 },
        },
      });
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(422);
      inlineError = JSON.stringify((err as ApiError).detail);
    }
    expect(inlineError).toContain("compressibilit");
    expect(renderClarificationPanel(items, inlineError)).toContain("compressibilit");

    // accept every proposed default (the accept-all button's request)
    const answers = Object.fromEntries(items.map((i) => [i.key, i.proposed_default]));
    const { remaining } = await api.postAnswers(id, answers);
    expect(remaining).toEqual([]);
    const after = await api.ambiguities(id);
    expect(after.items).toEqual([]);
    expect(renderClarificationPanel(after.items, null)).toContain("No decisions pending");

    // ledger browser shows the three provenance groups
    const { entries } = await api.ledger(id);
    expect(entries.length).toBeGreaterThan(0);
    const groups = groupLedger(entries);
    const ledgerHtml = renderLedger(groups);
    expect(ledgerHtml).toContain("User explicit");
    expect(ledgerHtml).toContain("Agent default");
    expect(ledgerHtml).toContain("Simulator default (tacit)");
    expect(groups.user_explicit.some((e) => e.key === "density_closure")).toBe(true);
  }, 60_000);
});

describe("run monitor against the live five-spot fixture", () => {
  it("reaches a certificate-true banner", async () => {
    const { id } = await api.createSession(fivespotSpec(), "interactive");
    const pending = await api.ambiguities(id);
    expect(pending.items).toEqual([]); // the fixture is complete

    await api.run(id);
    let monitor = emptyMonitor();
    let status = await api.status(id);
    const t0 = Date.now();
    while (Date.now() - t0 < 120_000) {
      status = await api.status(id);
      const page = await api.diagnostics(id, monitor.lastEventId);
      monitor = foldEvents(monitor, page.events);
      if ((status.phase === "done" || status.phase === "failed") && !status.running) break;
      await new Promise((r) => setTimeout(r, 300));
    }

    expect(status.phase).toBe("done");
    expect(status.certificate).toBe(true);
    expect(monitor.terminal).toEqual({ kind: "done", certificate: true });
    expect(monitor.steps.filter((s) => s.accepted).length).toBeGreaterThan(0);

    const b = banner(status);
    expect(b.kind).toBe("certified");
    const html = renderMonitor(monitor, status, b);
    expect(html).toContain('data-kind="certified"');

    // final PVI reached 1.0 on the monitor's companion results view
    const rates = await api.rates(id);
    const finalPvi = rates.pvi[rates.pvi.length - 1] ?? 0;
    expect(Math.abs(finalPvi - 1.0)).toBeLessThan(1e-9);
  }, 150_000);
});
