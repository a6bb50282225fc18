/** Job progress view: a pure fold over the event log.
 *
 * The view is a function of the events received and nothing else, so
 * replaying a recorded stream reproduces the identical view (and the
 * identical rendered markup). applyEvent returns a new view; it never
 * mutates its input.
 */

import type { JobEventWire } from "./api.js";
import type { ConnectionStatus } from "./sse.js";
import { TERMINAL_STATES } from "./sse.js";

/** Job lifecycle states in transition-table order. */
export const STATE_ORDER = [
  "Queued",
  "Slicing",
  "Staging",
  "Running",
  "Retrieving",
  "Done",
] as const;

/** Step names in execution order, for the timing bars. */
export const STEP_ORDER = [
  "slice",
  "prepare_input",
  "upload",
  "execute",
  "store_output",
  "retrieve",
] as const;

export interface JobView {
  jobId: string;
  plugin: string;
  /** Always equals the state of the last received event. */
  state: string;
  /** Strictly ordered by sequence number. */
  events: JobEventWire[];
  outputLinks: string[];
  failed: boolean;
  failureReason: string | null;
  terminal: boolean;
  connection: "idle" | ConnectionStatus;
}

export function emptyJobView(jobId: string, plugin: string): JobView {
  return {
    jobId,
    plugin,
    state: "Queued",
    events: [],
    outputLinks: [],
    failed: false,
    failureReason: null,
    terminal: false,
    connection: "idle",
  };
}

export function applyEvent(view: JobView, event: JobEventWire): JobView {
  const last = view.events.length ? view.events[view.events.length - 1].seq : 0;
  if (event.seq <= last) return view; // keeps the log strictly ordered
  const next: JobView = {
    ...view,
    events: [...view.events, event],
    state: event.state,
    terminal: TERMINAL_STATES.has(event.state),
  };
  if (event.state === "Done") {
    const links = event["output_links"];
    next.outputLinks = Array.isArray(links) ? links.map(String) : [];
  } else if (event.state === "Failed") {
    next.failed = true;
    const reason = event["reason"];
    next.failureReason = typeof reason === "string" ? reason : null;
  }
  return next;
}

export function applyConnection(view: JobView, status: ConnectionStatus): JobView {
  return { ...view, connection: status };
}

export interface TimingBar {
  step: string;
  ms: number;
  fraction: number;
}

/** Step timings as bars, in execution order, scaled to sum to 1. */
export function timingBars(stepTimings: Record<string, number>): TimingBar[] {
  const present = STEP_ORDER.filter((step) => step in stepTimings);
  const total = present.reduce((sum, step) => sum + stepTimings[step], 0);
  return present.map((step) => ({
    step,
    ms: stepTimings[step],
    fraction: total > 0 ? stepTimings[step] / total : 0,
  }));
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Render the view to markup. Pure: same view, same string. */
export function renderJobView(view: JobView): string {
  const badges = view.events
    .map((event) => {
      const current = event.seq === view.events[view.events.length - 1].seq;
      const cls = current ? "badge current" : "badge";
      return `<span class="${cls}" data-seq="${event.seq}">${escapeHtml(event.state)}</span>`;
    })
    .join("");

  const pieces = [
    `<header><h2>${escapeHtml(view.jobId)}</h2><span class="plugin">${escapeHtml(view.plugin)}</span></header>`,
    `<div class="badges">${badges}</div>`,
  ];

  if (view.connection === "reconnecting") {
    pieces.push(`<div class="reconnecting">reconnecting…</div>`);
  }
  if (view.failed) {
    const reason = view.failureReason ? `: ${escapeHtml(view.failureReason)}` : "";
    pieces.push(`<div class="banner failure">job failed${reason}</div>`);
  }
  if (view.outputLinks.length) {
    const items = view.outputLinks
      .map((link) => `<li><a href="${escapeHtml(link)}">${escapeHtml(link)}</a></li>`)
      .join("");
    pieces.push(`<ul class="outputs">${items}</ul>`);
  }
  return pieces.join("\n");
}

/** Render timing bars to markup (widths in percent of the largest step). */
export function renderTimingBars(bars: TimingBar[]): string {
  if (!bars.length) return `<div class="timings empty">no step timings yet</div>`;
  const widest = Math.max(...bars.map((bar) => bar.ms));
  const rows = bars
    .map((bar) => {
      const width = widest > 0 ? Math.round((bar.ms / widest) * 100) : 0;
      return (
        `<div class="timing-row"><span class="step">${escapeHtml(bar.step)}</span>` +
        `<div class="bar" style="width:${width}%"></div>` +
        `<span class="ms">${bar.ms.toFixed(0)} ms</span></div>`
      );
    })
    .join("");
  return `<div class="timings">${rows}</div>`;
}
