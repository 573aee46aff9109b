import { describe, expect, it } from "vitest";

import { ApiError, Progress, TriageApi } from "../src/api.js";
import { buildCsv } from "../src/csv.js";
import { KEY_LABELS, SessionFlow } from "../src/session.js";

interface Call {
  url: string;
  method: string;
  body: unknown;
}

type Responder = (call: Call) => Response | Promise<Response>;

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function fakeFetch(responder: Responder): { calls: Call[]; fetch: typeof fetch } {
  const calls: Call[] = [];
  const impl = async (input: string, init?: RequestInit): Promise<Response> => {
    const call: Call = {
      url: input,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : null,
    };
    calls.push(call);
    return responder(call);
  };
  return { calls, fetch: impl as typeof fetch };
}

function progressAfter(labeled: number, stopped = false): Progress {
  return { labeled, positives: Math.min(labeled, 2), pool: 50, phase: "cold_sampling", stopped };
}

function queryPayload(id: string, labeled: number) {
  return {
    id,
    features: { warning_pattern: "NP_ALWAYS_NULL", file_age: "12.5" },
    probability: null,
    phase: "cold_sampling",
    progress: progressAfter(labeled),
  };
}

const HANDLE = {
  session_id: "s1",
  dataset: "demo",
  created_at: "2026-01-01T00:00:00+00:00",
  status: "active",
  learner: "linear_svm",
  seed: 0,
};

function scriptedServer(opts?: { rejectFirstLabel?: boolean }) {
  let labeled = 0;
  let pendingIndex = 0;
  let rejectNext = opts?.rejectFirstLabel ?? false;
  const ids = ["w0007", "w0003", "w0011", "w0042"];
  return fakeFetch((call) => {
    if (call.url.endsWith("/v1/sessions") && call.method === "POST") {
      return json(201, HANDLE);
    }
    if (call.url.endsWith("/next")) {
      return json(200, queryPayload(ids[pendingIndex]!, labeled));
    }
    if (call.url.endsWith("/labels")) {
      const body = call.body as { id: string; label: string };
      if (rejectNext || body.id !== ids[pendingIndex]) {
        rejectNext = false;
        pendingIndex += 1; // someone else consumed the pending query
        return json(409, { detail: `'${body.id}' is not the current query` });
      }
      labeled += 1;
      pendingIndex += 1;
      return json(200, progressAfter(labeled));
    }
    if (call.url.endsWith("/stop")) {
      return json(200, { status: "stopped", labeled });
    }
    if (call.url.endsWith("/export")) {
      return new Response("id,label\nw0007,actionable\n", {
        status: 200,
        headers: { "content-type": "text/csv" },
      });
    }
    return json(404, { detail: "unknown route" });
  });
}

describe("TriageApi", () => {
  it("lists datasets", async () => {
    const { fetch } = fakeFetch(() => json(200, { datasets: ["demo", "derby_v5"] }));
    const api = new TriageApi("http://svc", fetch);
    expect(await api.listDatasets()).toEqual(["demo", "derby_v5"]);
  });

  it("throws ApiError with status and detail on failures", async () => {
    const { fetch } = fakeFetch(() => json(404, { detail: "unknown session 'x'" }));
    const api = new TriageApi("http://svc", fetch);
    const err = await api.nextQuery("x").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).message).toBe("unknown session 'x'");
  });
});

describe("SessionFlow", () => {
  it("starts a session and loads the first query", async () => {
    const { calls, fetch } = scriptedServer();
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo", seed: 0 });

    expect(calls[0]).toMatchObject({
      url: "http://svc/v1/sessions",
      method: "POST",
      body: { dataset: "demo", seed: 0 },
    });
    expect(flow.session?.session_id).toBe("s1");
    expect(flow.current?.id).toBe("w0007");
    expect(flow.progress?.labeled).toBe(0);
  });

  it("submits the pending id and advances on success", async () => {
    const { calls, fetch } = scriptedServer();
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });

    const outcome = await flow.label("actionable");
    expect(outcome.accepted).toBe(true);
    expect(outcome.progress?.labeled).toBe(1);
    expect(flow.labeled).toEqual([{ id: "w0007", label: "actionable" }]);
    expect(flow.current?.id).toBe("w0003");

    const post = calls.find((c) => c.url.endsWith("/labels"));
    expect(post?.body).toEqual({ id: "w0007", label: "actionable" });
  });

  it("discards the submission and refetches on 409", async () => {
    const { calls, fetch } = scriptedServer({ rejectFirstLabel: true });
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });

    const outcome = await flow.label("actionable");
    expect(outcome.accepted).toBe(false);
    expect(flow.labeled).toEqual([]);
    expect(flow.current?.id).toBe("w0003"); // moved on to the service's pending query
    expect(calls.filter((c) => c.url.endsWith("/next")).length).toBe(2);

    const retry = await flow.label("unactionable");
    expect(retry.accepted).toBe(true);
    expect(flow.labeled).toEqual([{ id: "w0003", label: "unactionable" }]);
  });

  it("allows only one submission in flight", async () => {
    let release: (() => void) | undefined;
    let labelPosts = 0;
    const { fetch } = fakeFetch(async (call) => {
      if (call.url.endsWith("/v1/sessions")) return json(201, HANDLE);
      if (call.url.endsWith("/next")) return json(200, queryPayload("w0007", 0));
      if (call.url.endsWith("/labels")) {
        labelPosts += 1;
        await new Promise<void>((resolve) => {
          release = resolve;
        });
        return json(200, progressAfter(1, true));
      }
      return json(404, { detail: "unknown route" });
    });
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });

    const first = flow.label("actionable");
    await expect(flow.label("unactionable")).rejects.toThrow(/already in flight/);
    expect(labelPosts).toBe(1);
    release?.();
    expect((await first).accepted).toBe(true);
  });

  it("keyboard bindings map to the same label calls as the buttons", async () => {
    expect(Object.keys(KEY_LABELS).sort()).toEqual(["a", "u"]);
    const { calls, fetch } = scriptedServer();
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });
    await flow.label(KEY_LABELS["a"]!);
    await flow.label(KEY_LABELS["u"]!);
    const posts = calls.filter((c) => c.url.endsWith("/labels")).map((c) => c.body);
    expect(posts).toEqual([
      { id: "w0007", label: "actionable" },
      { id: "w0003", label: "unactionable" },
    ]);
  });

  it("finishes when the session stops mid-label", async () => {
    const { fetch } = fakeFetch((call) => {
      if (call.url.endsWith("/v1/sessions")) return json(201, HANDLE);
      if (call.url.endsWith("/next")) return json(200, queryPayload("w0007", 0));
      if (call.url.endsWith("/labels")) return json(200, progressAfter(1, true));
      return json(404, { detail: "unknown route" });
    });
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });
    const outcome = await flow.label("actionable");
    expect(outcome.accepted).toBe(true);
    expect(flow.finished).toBe(true);
    expect(flow.current).toBeNull();
  });

  it("builds the label-log CSV in submission order", async () => {
    const { fetch } = scriptedServer();
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });
    await flow.label("actionable");
    await flow.label("unactionable");
    expect(flow.buildCsv()).toBe("id,label\nw0007,actionable\nw0003,unactionable\n");
    expect(buildCsv([])).toBe("id,label\n");
  });

  it("stopAndExport stops the session and returns the service CSV", async () => {
    const { calls, fetch } = scriptedServer();
    const flow = new SessionFlow(new TriageApi("http://svc", fetch));
    await flow.start({ dataset: "demo" });
    await flow.label("actionable");
    const csv = await flow.stopAndExport();
    expect(csv).toBe("id,label\nw0007,actionable\n");
    expect(flow.finished).toBe(true);
    expect(calls.some((c) => c.url.endsWith("/stop") && c.method === "POST")).toBe(true);
  });
});
