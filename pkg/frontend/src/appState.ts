/** App-level state: one serialized update queue and the notifications
 * panel. Every mutation flows through the queue, so view updates apply
 * in the order they were enqueued even when produced by concurrent
 * streams.
 */

import type { JobEventWire } from "./api.js";
import { TERMINAL_STATES } from "./sse.js";

/** Applies enqueued updates strictly one at a time, in order. */
export class UpdateQueue {
  private tail: Promise<void> = Promise.resolve();

  push(update: () => void | Promise<void>): Promise<void> {
    const next = this.tail.then(update);
    // keep the chain alive after a failed update
    this.tail = next.then(
      () => undefined,
      () => undefined,
    );
    return next;
  }
}

export interface Notification {
  kind: "job-done" | "job-failed";
  jobId: string;
  atMs: number;
  links: string[];
}

/** In-app mirror of the e-mail notifications the service sends on
 * terminal job states. */
export function notificationFor(event: JobEventWire): Notification | null {
  if (!TERMINAL_STATES.has(event.state) || event.state === "Cancelled") return null;
  const links = event["output_links"];
  return {
    kind: event.state === "Done" ? "job-done" : "job-failed",
    jobId: event.job_id,
    atMs: event.at_ms,
    links: Array.isArray(links) ? links.map(String) : [],
  };
}

export function appendNotification(
  panel: Notification[],
  event: JobEventWire,
): Notification[] {
  const note = notificationFor(event);
  if (!note) return panel;
  if (panel.some((have) => have.jobId === note.jobId && have.kind === note.kind)) {
    return panel;
  }
  return [...panel, note];
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderNotifications(panel: Notification[]): string {
  if (!panel.length) return `<div class="notifications empty">no notifications</div>`;
  const items = panel
    .map((note) => {
      const label = note.kind === "job-done" ? "finished" : "failed";
      const links = note.links
        .map((link) => `<a href="${escapeHtml(link)}">${escapeHtml(link)}</a>`)
        .join(" ");
      return `<li class="${note.kind}">job ${escapeHtml(note.jobId)} ${label} ${links}</li>`;
    })
    .join("");
  return `<ul class="notifications">${items}</ul>`;
}
