/** Bootstrap: session list, clarification flow, run monitor, results, and
 * diff viewer, all over the documented HTTP API with 750 ms polling. */

import { ApiClient, ApiError, SessionStatus } from "./api.js";
import { renderClarificationPanel, renderDiffViewer, renderLedger, renderMonitor, renderResults } from "./panels.js";
import { banner, clarificationAfterAnswer, ClarificationModel, emptyMonitor, foldEvents, groupLedger, MonitorModel, parseDraft } from "./state.js";

const POLL_MS = 750;
const api = new ApiClient("");

interface ActiveView {
  id: string;
  monitor: MonitorModel;
  clarification: ClarificationModel;
  status: SessionStatus | null;
  timer: number | null;
}

let active: ActiveView | null = null;

function el<T extends HTMLElement>(selector: string): T {
  const node = document.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

async function refreshSessionList(): Promise<void> {
  const { sessions } = await api.listSessions();
  const list = el<HTMLElement>("#session-list");
  list.innerHTML = sessions
    .map((s) => `<li><a href="#" data-id="${s.session_id}"><code>${s.session_id}</code></a>
      <span class="phase">${s.status}</span></li>`)
    .join("");
  list.querySelectorAll("a").forEach((a) =>
    a.addEventListener("click", (ev) => {
      ev.preventDefault();
      void openSession((ev.currentTarget as HTMLElement).dataset["id"] as string);
    }),
  );
}

async function openSession(id: string): Promise<void> {
  if (active?.timer) window.clearInterval(active.timer);
  active = { id, monitor: emptyMonitor(), clarification: { pending: [], drafts: {}, error: null }, status: null, timer: null };
  el<HTMLElement>("#active-id").textContent = id;
  await pollOnce();
  active.timer = window.setInterval(() => void pollOnce(), POLL_MS);
}

async function pollOnce(): Promise<void> {
  if (!active) return;
  const view = active;
  try {
    view.status = await api.status(view.id);
    const page = await api.diagnostics(view.id, view.monitor.lastEventId);
    view.monitor = foldEvents(view.monitor, page.events);
    if (view.status.phase === "clarify" || view.status.pending_count > 0) {
      const { items } = await api.ambiguities(view.id);
      view.clarification = { ...view.clarification, pending: items };
    } else {
      view.clarification = { ...view.clarification, pending: [] };
    }
    render();
    if (view.status.phase === "done" && !view.status.running) {
      if (view.timer) window.clearInterval(view.timer);
      view.timer = null;
      await showResults(view.id);
      await showLedger(view.id);
    } else if (view.status.phase === "failed") {
      if (view.timer) window.clearInterval(view.timer);
      view.timer = null;
      await showLedger(view.id);
    }
  } catch (err) {
    console.error(err);
  }
}

function render(): void {
  if (!active || !active.status) return;
  el<HTMLElement>("#monitor").innerHTML = renderMonitor(
    active.monitor, active.status, banner(active.status));
  el<HTMLElement>("#clarification").innerHTML = renderClarificationPanel(
    active.clarification.pending, active.clarification.error);
  wireClarification();
}

function wireClarification(): void {
  const root = el<HTMLElement>("#clarification");
  root.querySelectorAll<HTMLButtonElement>("button.accept").forEach((button) =>
    button.addEventListener("click", () => void submitAnswers([button.dataset["key"] as string])),
  );
  const all = root.querySelector<HTMLButtonElement>("button.accept-all");
  all?.addEventListener("click", () =>
    void submitAnswers(active?.clarification.pending.map((i) => i.key) ?? []),
  );
}

async function submitAnswers(keys: string[]): Promise<void> {
  if (!active || !keys.length) return;
  const view = active;
  const answers: Record<string, unknown> = {};
  try {
    for (const key of keys) {
      const area = document.querySelector<HTMLTextAreaElement>(`textarea.answer[data-key="${key}"]`);
      const item = view.clarification.pending.find((i) => i.key === key);
      answers[key] = area ? parseDraft(area.value) : item?.proposed_default;
    }
  } catch (err) {
    view.clarification = { ...view.clarification, error: `invalid JSON: ${String(err)}` };
    render();
    return;
  }
  try {
    const { remaining } = await api.postAnswers(view.id, answers);
    view.clarification = clarificationAfterAnswer(view.clarification, remaining);
    render();
  } catch (err) {
    const detail = err instanceof ApiError ? JSON.stringify(err.detail ?? err.message) : String(err);
    view.clarification = { ...view.clarification, error: detail };
    render();
  }
}

async function showLedger(id: string): Promise<void> {
  const { entries } = await api.ledger(id);
  el<HTMLElement>("#ledger").innerHTML = renderLedger(groupLedger(entries));
}

async function showResults(id: string): Promise<void> {
  try {
    const rates = await api.rates(id);
    el<HTMLElement>("#results").innerHTML = renderResults(rates);
  } catch {
    /* results not ready */
  }
}

function wireForms(): void {
  el<HTMLButtonElement>("#create").addEventListener("click", () => {
    void (async () => {
      try {
        const spec = JSON.parse(el<HTMLTextAreaElement>("#spec-input").value);
        const { id } = await api.createSession(spec, "interactive");
        await refreshSessionList();
        await openSession(id);
      } catch (err) {
        el<HTMLElement>("#create-error").textContent = String(err);
      }
    })();
  });
  el<HTMLButtonElement>("#run").addEventListener("click", () => {
    if (active) void api.run(active.id).then(() => pollOnce());
  });
  el<HTMLButtonElement>("#ledger-btn").addEventListener("click", () => {
    if (active) void showLedger(active.id);
  });
  el<HTMLButtonElement>("#diff-btn").addEventListener("click", () => {
    void (async () => {
      const ref = el<HTMLInputElement>("#diff-ref").value.trim();
      const cand = el<HTMLInputElement>("#diff-cand").value.trim();
      if (!ref || !cand) return;
      try {
        const report = await api.diff(ref, cand);
        el<HTMLElement>("#diff").innerHTML = renderDiffViewer(report);
      } catch (err) {
        el<HTMLElement>("#diff").textContent = String(err);
      }
    })();
  });
}

window.addEventListener("DOMContentLoaded", () => {
  wireForms();
  void refreshSessionList();
});
