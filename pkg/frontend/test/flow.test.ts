/** End-to-end flow against an in-memory stand-in for the service:
 * log in, upload, pick a plugin, submit, watch progress to Done, follow
 * the output links, and check that replaying the recorded stream
 * reproduces the identical final view.
 */

import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import type { JobEventWire, PluginRow } from "../src/api.js";
import { pumpJobEvents } from "../src/sse.js";
import type { ConnectionStatus } from "../src/sse.js";
import {
  applyConnection,
  applyEvent,
  emptyJobView,
  renderJobView,
  STATE_ORDER,
  type JobView,
} from "../src/jobView.js";
import { addInput, choosePlugin, emptyForm, pluginOptions, submitJob } from "../src/submitForm.js";
import { appendNotification, type Notification } from "../src/appState.js";

const TOKEN = "tok-alice";

interface FakeServerOptions {
  /** Close the first event stream after this many frames (no terminal),
   * to exercise the reconnect path. 0 means never drop. */
  dropAfter?: number;
}

/** Speaks the documented HTTP surface from memory. */
class FakeServer {
  plugins: PluginRow[] = [
    {
      id: "word-count",
      status: "Online",
      consecutive_critical_failures: 0,
      threshold: 3,
      accepts_user_jobs: true,
    },
    {
      id: "forecast-stub",
      status: "Blacklisted",
      consecutive_critical_failures: 3,
      threshold: 3,
      accepts_user_jobs: false,
    },
  ];
  uploads: { body: Record<string, unknown>; fileId: string; docId: string }[] = [];
  eventOpens: number[] = [];
  private streamCount = 0;

  constructor(private options: FakeServerOptions = {}) {}

  private events(jobId: string): JobEventWire[] {
    return [
      { seq: 1, job_id: jobId, state: "Queued", at_ms: 0 },
      { seq: 2, job_id: jobId, state: "Slicing", at_ms: 10 },
      { seq: 3, job_id: jobId, state: "Staging", at_ms: 20 },
      { seq: 4, job_id: jobId, state: "Running", at_ms: 30 },
      { seq: 5, job_id: jobId, state: "Retrieving", at_ms: 40 },
      {
        seq: 6,
        job_id: jobId,
        state: "Done",
        at_ms: 50,
        output_links: ["/documents/out-1"],
      },
    ];
  }

  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const { pathname, searchParams } = new URL(url);
    const method = init?.method ?? "GET";
    const headers = (init?.headers ?? {}) as Record<string, string>;
    const body = init?.body ? (JSON.parse(String(init.body)) as Record<string, unknown>) : {};

    if (method === "POST" && pathname === "/login") {
      if (body.username === "alice" && body.password === "wonderland") {
        return this.json(200, {
          token: TOKEN,
          user_id: "alice",
          role: "user",
          expires_at: 9999,
        });
      }
      return this.json(401, { code: "auth", message: "bad credentials" });
    }

    if (headers["authorization"] !== `Bearer ${TOKEN}`) {
      return this.json(401, { code: "auth", message: "missing bearer token" });
    }

    if (method === "POST" && pathname === "/documents") {
      const n = this.uploads.length + 1;
      const upload = { body, fileId: `file-${n}`, docId: `doc-${n}` };
      this.uploads.push(upload);
      return this.json(200, { file_id: upload.fileId, doc_id: upload.docId });
    }
    if (method === "GET" && pathname === "/documents/out-1") {
      const counts = { blight: 1, wheat: 2 };
      return this.json(200, {
        id: "out-1",
        uri: "urn:fdc:output:job-1:counts.json",
        title: "counts.json",
        author: "word-count",
        date: "2026-08-22",
        media_type: "application/json",
        text: JSON.stringify(counts),
        tag_ids: [],
        spans: [],
        content_b64: btoa(JSON.stringify(counts)),
      });
    }
    if (method === "GET" && pathname === "/plugins") {
      return this.json(200, { plugins: this.plugins });
    }
    if (method === "POST" && pathname === "/jobs") {
      const plugin = this.plugins.find((p) => p.id === body.plugin_id);
      if (!plugin) return this.json(404, { code: "not-found", message: "no such plugin" });
      if (plugin.status === "Blacklisted" || !plugin.accepts_user_jobs) {
        return this.json(409, {
          code: "rejected",
          message: `plugin ${plugin.id} is blacklisted`,
        });
      }
      return this.json(200, { job_id: "job-1" });
    }
    const eventsMatch = pathname.match(/^\/jobs\/([^/]+)\/events$/);
    if (method === "GET" && eventsMatch) {
      const lastSeen = Number(searchParams.get("last_seen") ?? "0");
      this.eventOpens.push(lastSeen);
      this.streamCount += 1;
      const dropAfter =
        this.streamCount === 1 && this.options.dropAfter ? this.options.dropAfter : 0;
      let pending = this.events(eventsMatch[1]).filter((e) => e.seq > lastSeen);
      if (dropAfter) pending = pending.slice(0, dropAfter);
      const encoder = new TextEncoder();
      const stream = new ReadableStream<Uint8Array>({
        start(controller) {
          for (const event of pending) {
            const data = JSON.stringify(event);
            controller.enqueue(encoder.encode(`id:${event.seq}\ndata:${data}\n\n`));
          }
          controller.close();
        },
      });
      return new Response(stream, { status: 200 });
    }
    return this.json(404, { code: "not-found", message: `no route ${method} ${pathname}` });
  };

  private json(status: number, payload: unknown): Response {
    return new Response(JSON.stringify(payload), { status });
  }
}

interface FlowResult {
  view: JobView;
  recorded: JobEventWire[];
  statuses: ConnectionStatus[];
  notifications: Notification[];
  client: ApiClient;
  server: FakeServer;
}

async function runFlow(options: FakeServerOptions = {}): Promise<FlowResult> {
  const server = new FakeServer(options);
  const client = new ApiClient("http://svc", server.fetch);

  await client.login("alice", "wonderland");
  const upload = await client.uploadText("wheat blight near the river field", {
    title: "field notes",
  });

  const rows = await client.listPlugins();
  const options_ = pluginOptions(rows);
  expect(options_.find((o) => o.id === "forecast-stub")?.disabled).toBe(true);

  let form = addInput(choosePlugin(emptyForm(), "word-count"), upload.file_id);
  const outcome = await submitJob(client, form);
  expect(outcome.jobId).toBe("job-1");
  form = outcome.state;

  let view = emptyJobView(outcome.jobId!, form.plugin!);
  const recorded: JobEventWire[] = [];
  const statuses: ConnectionStatus[] = [];
  let notifications: Notification[] = [];

  await pumpJobEvents(
    (lastSeen) => client.openEventStream(outcome.jobId!, lastSeen),
    {
      onEvent: (event) => {
        recorded.push(event);
        view = applyEvent(view, event);
        notifications = appendNotification(notifications, event);
      },
      onStatus: (status) => {
        statuses.push(status);
        view = applyConnection(view, status);
      },
    },
    { wait: () => Promise.resolve() },
  );

  return { view, recorded, statuses, notifications, client, server };
}

describe("login to output links", () => {
  it("walks the whole flow and shows badges in transition order", async () => {
    const { view, client, server, notifications } = await runFlow();

    expect(server.uploads[0].body.title).toBe("field notes");
    expect(view.state).toBe("Done");
    expect(view.terminal).toBe(true);
    expect(view.events.map((e) => e.state)).toEqual([...STATE_ORDER]);
    expect(view.outputLinks).toEqual(["/documents/out-1"]);

    const html = renderJobView(view);
    const badgeStates = [...html.matchAll(/data-seq="\d+">([^<]+)<\/span>/g)].map((m) => m[1]);
    expect(badgeStates).toEqual([...STATE_ORDER]);
    expect(html).toContain(`<a href="/documents/out-1">`);

    // the links the server handed out actually resolve
    const doc = await client.getLink(view.outputLinks[0]);
    const counts = JSON.parse(atob(doc.content_b64));
    expect(counts).toEqual({ blight: 1, wheat: 2 });

    expect(notifications).toEqual([
      { kind: "job-done", jobId: "job-1", atMs: 50, links: ["/documents/out-1"] },
    ]);
  });

  it("a blacklisted plugin cannot be submitted and the form survives", async () => {
    const server = new FakeServer();
    const client = new ApiClient("http://svc", server.fetch);
    await client.login("alice", "wonderland");
    const upload = await client.uploadText("text", {});
    const form = addInput(choosePlugin(emptyForm(), "forecast-stub"), upload.file_id);
    const outcome = await submitJob(client, form);
    expect(outcome.jobId).toBeNull();
    expect(outcome.state.error).toBe("rejected: plugin forecast-stub is blacklisted");
    expect(outcome.state.plugin).toBe("forecast-stub");
    expect(outcome.state.inputs).toEqual([upload.file_id]);
  });

  it("rejects the wrong password with the server's error shape", async () => {
    const server = new FakeServer();
    const client = new ApiClient("http://svc", server.fetch);
    const err = await client.login("alice", "nope").catch((e) => e);
    expect(err.code).toBe("auth");
    expect(client.loggedIn()).toBe(false);
  });
});

describe("dropped connection", () => {
  it("reconnects from the last seen event with no duplicates", async () => {
    const { view, recorded, statuses, server } = await runFlow({ dropAfter: 2 });

    // first open from 0 was cut after two frames; resume asked for > 2
    expect(server.eventOpens).toEqual([0, 2]);
    expect(statuses).toContain("reconnecting");
    expect(recorded.map((e) => e.seq)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(view.events.map((e) => e.seq)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(view.state).toBe("Done");
    expect(view.outputLinks).toEqual(["/documents/out-1"]);
  });
});

describe("replay determinism", () => {
  it("replaying the recorded stream reproduces the identical final view", async () => {
    const { view, recorded } = await runFlow();

    let replayed = emptyJobView("job-1", "word-count");
    for (const event of recorded) replayed = applyEvent(replayed, event);
    replayed = applyConnection(replayed, "closed");

    expect(replayed).toEqual(view);
    expect(renderJobView(replayed)).toBe(renderJobView(view));
  });

  it("a reconnected run and a clean run converge to the same rendered view", async () => {
    const clean = await runFlow();
    const dropped = await runFlow({ dropAfter: 3 });
    expect(renderJobView(dropped.view)).toBe(renderJobView(clean.view));
  });
});
