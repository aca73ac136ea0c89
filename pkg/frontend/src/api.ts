/** Typed client for the groundloop HTTP API. All numbers are SI; display
 * conversion happens in the view layer only. */

export interface AmbiguityItem {
  key: string;
  description: string;
  severity: string;
  divergence_prone: boolean;
  proposed_default: unknown;
  rationale: string;
}

export interface SessionStatus {
  id: string;
  phase: string;
  revision: number;
  running: boolean;
  pending_count: number;
  config_hash: string | null;
  certificate: boolean;
  failure: { reason: string; detail: unknown } | null;
}

export interface LedgerEntry {
  key: string;
  value: unknown;
  provenance: string;
  rationale: string;
  timestamp: number;
  event_id: number | null;
}

export interface SessionEvent {
  event_id: number;
  kind: string;
  payload: Record<string, unknown>;
  payload_hash: string;
  timestamp: number;
}

export interface DiagnosticsPage {
  events: SessionEvent[];
  next: number;
}

export interface RatesPayload {
  well_names: string[];
  times: number[];
  pvi: number[];
  rates_water: number[][];
  rates_oil: number[][];
  bhp: number[][];
  cumulative_injection: number[];
  pore_volume: number;
  avg_pressure: number[];
  report_times: number[];
}

export interface DiffReport {
  closures: Record<string, { status: string; reference?: unknown; candidate?: unknown; attribution?: unknown }>;
  geometry: Record<string, unknown>;
  fields: { hash_equal: Record<string, boolean>; [k: string]: unknown };
  wells: Record<string, unknown>;
  responses: Record<string, unknown>;
  differing_keys: string[];
  all_equal: boolean;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: unknown = null,
  ) {
    super(message);
  }
}

async function asJson(response: Response): Promise<unknown> {
  const text = await response.text();
  let body: unknown = null;
  try {
    body = text ? JSON.parse(text) : null;
  } catch {
    body = { message: text };
  }
  if (!response.ok) {
    const err = body as { code?: string; message?: string; detail?: unknown } | null;
    throw new ApiError(
      response.status,
      err?.code ?? "http_error",
      err?.message ?? `HTTP ${response.status}`,
      err?.detail ?? null,
    );
  }
  return body;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async get(path: string): Promise<unknown> {
    return asJson(await this.fetchFn(this.base + path));
  }

  private async post(path: string, body: unknown): Promise<unknown> {
    return asJson(
      await this.fetchFn(this.base + path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }

  createSession(spec: unknown, policy = "interactive"): Promise<{ id: string; phase: string }> {
    return this.post("/sessions", { spec, policy }) as Promise<{ id: string; phase: string }>;
  }

  listSessions(): Promise<{ sessions: { session_id: string; status: string; policy: string }[] }> {
    return this.get("/sessions") as Promise<{ sessions: { session_id: string; status: string; policy: string }[] }>;
  }

  status(id: string): Promise<SessionStatus> {
    return this.get(`/sessions/${id}`) as Promise<SessionStatus>;
  }

  ambiguities(id: string): Promise<{ items: AmbiguityItem[] }> {
    return this.get(`/sessions/${id}/ambiguities`) as Promise<{ items: AmbiguityItem[] }>;
  }

  postAnswers(id: string, answers: Record<string, unknown>): Promise<{ remaining: string[] }> {
    return this.post(`/sessions/${id}/answers`, { answers }) as Promise<{ remaining: string[] }>;
  }

  run(id: string): Promise<{ status: string }> {
    return this.post(`/sessions/${id}/run`, {}) as Promise<{ status: string }>;
  }

  diagnostics(id: string, since = -1): Promise<DiagnosticsPage> {
    return this.get(`/sessions/${id}/diagnostics?since=${since}`) as Promise<DiagnosticsPage>;
  }

  ledger(id: string): Promise<{ entries: LedgerEntry[] }> {
    return this.get(`/sessions/${id}/ledger`) as Promise<{ entries: LedgerEntry[] }>;
  }

  rates(id: string): Promise<RatesPayload> {
    return this.get(`/sessions/${id}/results/rates`) as Promise<RatesPayload>;
  }

  snapshot(id: string, index: number): Promise<{ index: number; pressure: number[]; saturation: number[]; dims: { nx: number; ny: number; nz: number } }> {
    return this.get(`/sessions/${id}/results/snapshots?index=${index}`) as Promise<{
      index: number; pressure: number[]; saturation: number[];
      dims: { nx: number; ny: number; nz: number };
    }>;
  }

  diff(refId: string, candId: string): Promise<DiffReport> {
    return this.post("/diffs", { ref: { session: refId }, cand: { session: candId } }) as Promise<DiffReport>;
  }

  search(q: string, k = 10): Promise<{ results: { entry_id: string; title: string; snippet: string; score: number }[] }> {
    return this.get(`/search?q=${encodeURIComponent(q)}&k=${k}`) as Promise<{
      results: { entry_id: string; title: string; snippet: string; score: number }[];
    }>;
  }
}
