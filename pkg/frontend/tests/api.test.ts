import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function mockFetch(status: number, body: unknown) {
  return vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  });
}

describe("ApiClient", () => {
  it("creates sessions with policy", async () => {
    const fetchFn = mockFetch(201, { id: "abc", phase: "clarify" });
    const client = new ApiClient("http://x", fetchFn as unknown as typeof fetch);
    const out = await client.createSession({ meta: {} }, "interactive");
    expect(out.id).toBe("abc");
    const [url, init] = fetchFn.mock.calls[0]!;
    expect(url).toBe("http://x/sessions");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(String(init?.body))).toEqual({ spec: { meta: {} }, policy: "interactive" });
  });

  it("encodes diagnostics cursor and search query", async () => {
    const fetchFn = mockFetch(200, { events: [], next: 4 });
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await client.diagnostics("s1", 4);
    expect(fetchFn.mock.calls[0]![0]).toBe("/sessions/s1/diagnostics?since=4");
    await client.search("relative permeability", 3);
    expect(fetchFn.mock.calls[1]![0]).toBe("/search?q=relative%20permeability&k=3");
  });

  it("posts answers under the answers key", async () => {
    const fetchFn = mockFetch(200, { remaining: [] });
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await client.postAnswers("s1", { porosity_spec: { means: [0.2] } });
    const body = JSON.parse(String(fetchFn.mock.calls[0]![1]?.body));
    expect(body).toEqual({ answers: { porosity_spec: { means: [0.2] } } });
  });

  it("maps error envelopes to ApiError", async () => {
    const fetchFn = mockFetch(422, {
      code: "invariant_violation",
      message: "porosity mean in (0, 1)",
      detail: { invariant: "porosity_spec" },
    });
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await expect(client.run("s1")).rejects.toMatchObject({
      status: 422,
      code: "invariant_violation",
    });
    try {
      await client.run("s1");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).detail).toEqual({ invariant: "porosity_spec" });
    }
  });

  it("builds diff requests from session ids", async () => {
    const fetchFn = mockFetch(200, { all_equal: true, differing_keys: [] });
    const client = new ApiClient("", fetchFn as unknown as typeof fetch);
    await client.diff("r1", "c1");
    const body = JSON.parse(String(fetchFn.mock.calls[0]![1]?.body));
    expect(body).toEqual({ ref: { session: "r1" }, cand: { session: "c1" } });
  });
});
