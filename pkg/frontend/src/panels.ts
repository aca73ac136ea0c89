/** HTML renderers for the four views. Each returns a markup string; the
 * bootstrap code owns insertion and event wiring. */

import type { AmbiguityItem, DiffReport, LedgerEntry, RatesPayload, SessionStatus } from "./api.js";
import { lineChart } from "./charts.js";
import { fmt, provenanceLabel, shortValue } from "./format.js";
import { Banner, LedgerGroups, MonitorModel, PROVENANCE_ORDER, waterCutSeries } from "./state.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderClarificationPanel(items: AmbiguityItem[], error: string | null): string {
  if (!items.length) {
    return `<div class="panel clarification" data-empty="true">
      <h2>Clarifications</h2><p class="muted">No decisions pending.</p></div>`;
  }
  const rows = items.map((item) => `
    <div class="clarify-item" data-key="${esc(item.key)}">
      <div class="clarify-head">
        <code>${esc(item.key)}</code>
        <span class="sev ${esc(item.severity)}">${esc(item.severity)}</span>
        ${item.divergence_prone ? '<span class="divergence" title="known reconstruction-divergence axis">divergence-prone</span>' : ""}
      </div>
      <p>${esc(item.description)}</p>
      <p class="rationale">${esc(item.rationale)}</p>
      <textarea class="answer" data-key="${esc(item.key)}" rows="2">${esc(JSON.stringify(item.proposed_default))}</textarea>
      <div class="clarify-actions">
        <button class="accept" data-key="${esc(item.key)}">Accept</button>
      </div>
    </div>`).join("");
  return `<div class="panel clarification">
    <h2>Clarifications</h2>
    ${error ? `<p class="error">${esc(error)}</p>` : ""}
    ${rows}
    <button class="accept-all">Accept all proposed defaults</button>
  </div>`;
}

export function renderLedger(groups: LedgerGroups): string {
  const sections = PROVENANCE_ORDER.map((provenance) => {
    const entries = groups[provenance];
    const rows = entries.map((entry: LedgerEntry) => `
      <tr data-event="${entry.event_id ?? ""}">
        <td><code>${esc(entry.key)}</code></td>
        <td class="value">${esc(shortValue(entry.value))}</td>
        <td class="rationale">${esc(entry.rationale)}</td>
      </tr>`).join("");
    const flagged = provenance === "simulator_default" && entries.length
      ? " flagged" : "";
    return `<section class="ledger-group ${provenance}${flagged}">
      <h3>${provenanceLabel(provenance)} <span class="count">(${entries.length})</span></h3>
      ${entries.length
        ? `<table><thead><tr><th>decision</th><th>value</th><th>rationale</th></tr></thead><tbody>${rows}</tbody></table>`
        : '<p class="muted">none</p>'}
    </section>`;
  }).join("");
  return `<div class="panel ledger"><h2>Assumption ledger</h2>${sections}</div>`;
}

export function renderBanner(b: Banner): string {
  return `<div class="banner ${b.kind}" data-kind="${b.kind}">${esc(b.text)}</div>`;
}

export function renderMonitor(model: MonitorModel, status: SessionStatus | null, b: Banner): string {
  const accepted = model.steps.filter((s) => s.accepted);
  const dtSeries = {
    label: "dt (s)",
    points: accepted.map((s, i) => [i, s.dt] as [number, number]),
  };
  const iterSeries = {
    label: "Newton iterations",
    points: accepted.map((s, i) => [i, s.iterations ?? 0] as [number, number]),
  };
  const mbSeries = {
    label: "mass-balance error (water)",
    points: accepted
      .filter((s) => (s.mbWater ?? 0) > 0)
      .map((s, i) => [i, s.mbWater as number] as [number, number]),
  };
  const charts = accepted.length
    ? `<div class="charts">
        ${lineChart([dtSeries], { yLabel: "dt (s)", xLabel: "accepted step", logY: true })}
        ${lineChart([iterSeries], { yLabel: "iterations", xLabel: "accepted step" })}
        ${mbSeries.points.length ? lineChart([mbSeries], { yLabel: "mb error", xLabel: "accepted step", logY: true }) : ""}
      </div>`
    : '<p class="muted">no steps yet</p>';
  return `<div class="panel monitor">
    <h2>Run monitor</h2>
    ${renderBanner(b)}
    <p class="totals">steps: ${accepted.length} &middot; cuts: ${model.cuts}
      &middot; reports: ${model.reports.length}</p>
    ${charts}
  </div>`;
}

export function renderResults(rates: RatesPayload): string {
  const cuts = waterCutSeries(rates.well_names, rates.pvi, rates.rates_water, rates.rates_oil);
  const pviSeries = cuts.map((c) => ({ label: `${c.name} water cut`, points: c.points }));
  const avgP = {
    label: "avg pressure (bar)",
    points: rates.report_times.map((t, i) => {
      const pvi = interp(t, rates.times, rates.pvi);
      return [pvi, (rates.avg_pressure[i] ?? 0) / 1e5] as [number, number];
    }),
  };
  return `<div class="panel results">
    <h2>Results</h2>
    <div class="charts">
      ${lineChart(pviSeries, { xLabel: "PVI", yLabel: "water cut" })}
      ${lineChart([avgP], { xLabel: "PVI", yLabel: "avg pressure (bar)" })}
    </div>
  </div>`;
}

function interp(x: number, xs: number[], ys: number[]): number {
  if (!xs.length) return 0;
  if (x <= (xs[0] ?? 0)) return ys[0] ?? 0;
  for (let i = 1; i < xs.length; i++) {
    const xi = xs[i] ?? 0;
    if (x <= xi) {
      const x0 = xs[i - 1] ?? 0;
      const y0 = ys[i - 1] ?? 0;
      const y1 = ys[i] ?? 0;
      const w = xi === x0 ? 0 : (x - x0) / (xi - x0);
      return y0 + w * (y1 - y0);
    }
  }
  return ys[ys.length - 1] ?? 0;
}

export function renderDiffViewer(report: DiffReport): string {
  const closureRows = Object.entries(report.closures)
    .map(([key, diff]) => {
      const differs = diff.status !== "equal";
      const attribution = (diff as { attribution?: { provenance?: string } }).attribution;
      return `<tr class="${differs ? "differs" : "equal"}">
        <td><code>${esc(key)}</code></td>
        <td>${esc(diff.status)}</td>
        <td class="value">${differs ? esc(shortValue(diff.reference)) : ""}</td>
        <td class="value">${differs ? esc(shortValue(diff.candidate)) : ""}</td>
        <td>${attribution?.provenance ? esc(provenanceLabel(String(attribution.provenance))) : ""}</td>
      </tr>`;
    }).join("");
  const responses = report.responses as Record<string, unknown>;
  const geometry = report.geometry as Record<string, unknown>;
  return `<div class="panel diff">
    <h2>Divergence report ${report.all_equal ? '<span class="equal-badge">all equal</span>' : ""}</h2>
    <table class="closures">
      <thead><tr><th>decision</th><th>status</th><th>reference</th><th>candidate</th><th>attribution</th></tr></thead>
      <tbody>${closureRows}</tbody>
    </table>
    <p>pore-volume delta: ${fmt(Number(geometry["pore_volume_delta_rel"] ?? 0) * 100)}% &middot;
       rate L1: ${fmt(Number(responses["rate_water_l1_rel"] ?? 0) * 100)}% &middot;
       avg-pressure L1: ${fmt(Number(responses["avg_pressure_l1_rel"] ?? 0) * 100)}%</p>
  </div>`;
}
