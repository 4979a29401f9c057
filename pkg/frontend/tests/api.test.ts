import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, SessionClient } from "../src/api.js";

function mockFetch(status: number, body: unknown) {
  const fn = vi.fn(async () => ({
    ok: status < 400,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  }));
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("SessionClient", () => {
  it("creates sessions with the wire payload", async () => {
    const fetchMock = mockFetch(200, { id: "s1", nodes: [] });
    const client = new SessionClient("http://svc");
    await client.createSession({ id: "r", document: ["a."], summary: ["b."] }, "training");
    const [url, init] = fetchMock.mock.calls[0]!;
    expect(url).toBe("http://svc/v1/sessions");
    expect(JSON.parse((init as RequestInit).body as string)).toEqual({
      record: { id: "r", document: ["a."], summary: ["b."] },
      phase: "training",
      training_programs: [],
    });
  });

  it("unwraps the state envelope from applyEdge", async () => {
    mockFetch(200, { node: { id: "N1" }, state: { id: "s1", nodes: [] } });
    const client = new SessionClient();
    const state = await client.applyEdge("s1", "fusion", ["D1", "D2"], 0);
    expect(state).toEqual({ id: "s1", nodes: [] });
  });

  it("sends pin and undo to the session endpoints", async () => {
    const fetchMock = mockFetch(200, { id: "s1" });
    const client = new SessionClient();
    await client.pin("s1", 1, "N2");
    await client.undo("s1");
    const urls = fetchMock.mock.calls.map((c) => c[0]);
    expect(urls).toEqual(["/v1/sessions/s1/pin", "/v1/sessions/s1/undo"]);
    const pinBody = JSON.parse((fetchMock.mock.calls[0]![1] as RequestInit).body as string);
    expect(pinBody).toEqual({ target_index: 1, node_id: "N2" });
  });

  it("surfaces rule tags from inadmissible edges", async () => {
    mockFetch(400, { detail: "edge violates rule5", rule: "rule5:temporal-order" });
    const client = new SessionClient();
    const attempt = client.propose("s1", "fusion", ["D2", "D1"]);
    await expect(attempt).rejects.toBeInstanceOf(ApiError);
    await attempt.catch((error: ApiError) => {
      expect(error.status).toBe(400);
      expect(error.rule).toBe("rule5:temporal-order");
    });
  });

  it("keeps the status text when the error body is not json", async () => {
    const fn = vi.fn(async () => ({
      ok: false,
      status: 502,
      statusText: "Bad Gateway",
      json: async () => {
        throw new Error("no body");
      },
    }));
    vi.stubGlobal("fetch", fn);
    const client = new SessionClient();
    await expect(client.getSession("s1")).rejects.toMatchObject({
      status: 502,
      detail: "Bad Gateway",
    });
  });
});
