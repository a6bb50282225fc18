import { describe, expect, it } from "vitest";
import {
  applyConnection,
  applyEvent,
  emptyJobView,
  renderJobView,
  renderTimingBars,
  STATE_ORDER,
  timingBars,
} from "../src/jobView.js";
import type { JobEventWire } from "../src/api.js";

function ev(seq: number, state: string, extra: Record<string, unknown> = {}): JobEventWire {
  return { seq, job_id: "job-1", state, at_ms: seq * 100, ...extra };
}

const happyPath: JobEventWire[] = [
  ev(1, "Queued"),
  ev(2, "Slicing"),
  ev(3, "Staging"),
  ev(4, "Running"),
  ev(5, "Retrieving"),
  ev(6, "Done", { output_links: ["/documents/out-1"] }),
];

function fold(events: JobEventWire[]) {
  let view = emptyJobView("job-1", "word-count");
  for (const event of events) view = applyEvent(view, event);
  return view;
}

describe("applyEvent", () => {
  it("keeps the event log strictly ordered by sequence", () => {
    const view = fold(happyPath);
    expect(view.events.map((e) => e.seq)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(view.events.map((e) => e.state)).toEqual([...STATE_ORDER]);
  });

  it("rendered state always equals the last received event", () => {
    let view = emptyJobView("job-1", "word-count");
    for (const event of happyPath) {
      view = applyEvent(view, event);
      expect(view.state).toBe(event.state);
    }
  });

  it("drops duplicates and stale replays", () => {
    let view = fold(happyPath.slice(0, 3));
    view = applyEvent(view, ev(2, "Slicing")); // reconnect replay
    view = applyEvent(view, ev(3, "Staging"));
    expect(view.events).toHaveLength(3);
    expect(view.state).toBe("Staging");
  });

  it("never mutates the previous view", () => {
    const before = fold(happyPath.slice(0, 2));
    const frozen = JSON.stringify(before);
    applyEvent(before, ev(3, "Staging"));
    expect(JSON.stringify(before)).toBe(frozen);
  });

  it("reveals output links only on Done", () => {
    const running = fold(happyPath.slice(0, 5));
    expect(running.terminal).toBe(false);
    expect(running.outputLinks).toEqual([]);
    const done = applyEvent(running, happyPath[5]);
    expect(done.terminal).toBe(true);
    expect(done.outputLinks).toEqual(["/documents/out-1"]);
  });

  it("marks failures and records the reason, with no links", () => {
    const view = fold([
      ev(1, "Queued"),
      ev(2, "Slicing"),
      ev(3, "Failed", { reason: "plugin error: boom" }),
    ]);
    expect(view.failed).toBe(true);
    expect(view.terminal).toBe(true);
    expect(view.failureReason).toBe("plugin error: boom");
    expect(view.outputLinks).toEqual([]);
  });
});

describe("renderJobView", () => {
  it("shows one badge per event, in transition order", () => {
    const html = renderJobView(fold(happyPath));
    const badges = [...html.matchAll(/<span class="badge[^"]*" data-seq="(\d+)">([^<]+)<\/span>/g)];
    expect(badges.map((m) => m[2])).toEqual([...STATE_ORDER]);
    expect(badges.map((m) => Number(m[1]))).toEqual([1, 2, 3, 4, 5, 6]);
  });

  it("highlights only the latest badge", () => {
    const html = renderJobView(fold(happyPath.slice(0, 4)));
    const current = [...html.matchAll(/badge current/g)];
    expect(current).toHaveLength(1);
    expect(html).toMatch(/badge current" data-seq="4">Running/);
  });

  it("links outputs only once the job is Done", () => {
    const running = renderJobView(fold(happyPath.slice(0, 5)));
    expect(running).not.toContain("outputs");
    const done = renderJobView(fold(happyPath));
    expect(done).toContain(`<a href="/documents/out-1">`);
  });

  it("shows a failure banner and no output links on Failed", () => {
    const html = renderJobView(
      fold([ev(1, "Queued"), ev(2, "Failed", { reason: "task t-0 failed" })]),
    );
    expect(html).toContain("banner failure");
    expect(html).toContain("task t-0 failed");
    expect(html).not.toContain("<a href");
  });

  it("shows a reconnecting indicator while the stream is down", () => {
    const view = applyConnection(fold(happyPath.slice(0, 2)), "reconnecting");
    expect(renderJobView(view)).toContain("reconnecting");
    const back = applyConnection(view, "live");
    expect(renderJobView(back)).not.toContain("reconnecting");
  });

  it("escapes markup in event payloads", () => {
    const view = fold([ev(1, "Queued"), ev(2, "Failed", { reason: `<img src=x>` })]);
    const html = renderJobView(view);
    expect(html).not.toContain("<img");
    expect(html).toContain("&lt;img src=x&gt;");
  });
});

describe("replay determinism", () => {
  it("replaying a recorded stream reproduces the identical view and markup", () => {
    const recorded = [...happyPath];
    const live = fold(recorded);
    const replay = fold(recorded);
    expect(replay).toEqual(live);
    expect(renderJobView(replay)).toBe(renderJobView(live));
  });

  it("a replay interleaved with duplicates still converges to the same view", () => {
    const noisy = [
      happyPath[0],
      happyPath[1],
      happyPath[0], // replayed after a reconnect
      happyPath[1],
      happyPath[2],
      happyPath[3],
      happyPath[4],
      happyPath[5],
    ];
    expect(fold(noisy)).toEqual(fold(happyPath));
  });
});

describe("timing bars", () => {
  it("orders steps by execution order and scales fractions to one", () => {
    const bars = timingBars({
      execute: 400,
      slice: 100,
      upload: 200,
      retrieve: 100,
      prepare_input: 100,
      store_output: 100,
    });
    expect(bars.map((b) => b.step)).toEqual([
      "slice",
      "prepare_input",
      "upload",
      "execute",
      "store_output",
      "retrieve",
    ]);
    const total = bars.reduce((s, b) => s + b.fraction, 0);
    expect(total).toBeCloseTo(1, 12);
    expect(bars[3].fraction).toBeCloseTo(0.4, 12);
  });

  it("skips steps that have not happened yet", () => {
    const bars = timingBars({ slice: 50, upload: 150 });
    expect(bars.map((b) => b.step)).toEqual(["slice", "upload"]);
  });

  it("renders a placeholder when there is nothing to show", () => {
    expect(renderTimingBars([])).toContain("no step timings yet");
    const html = renderTimingBars(timingBars({ slice: 10, execute: 40 }));
    expect(html).toContain(`style="width:100%"`);
    expect(html).toContain(`style="width:25%"`);
  });
});
