/** Server-sent event plumbing for job progress.
 *
 * The server frames events as `id:<seq>\ndata:<json>\n\n`. The parser is
 * incremental (frames may arrive split across chunks) and pumpJobEvents
 * adds the reconnect loop: on a dropped stream it reopens from the last
 * sequence number it saw, so nothing is rendered twice.
 */

import type { JobEventWire } from "./api.js";

export const TERMINAL_STATES = new Set(["Done", "Failed", "Cancelled"]);

export interface SseFrame {
  id: number;
  data: string;
}

export class SseParser {
  private buffer = "";

  /** Feed one chunk; returns every frame completed by it. */
  push(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    for (;;) {
      const split = this.buffer.indexOf("\n\n");
      if (split < 0) break;
      const raw = this.buffer.slice(0, split);
      this.buffer = this.buffer.slice(split + 2);
      let id = -1;
      let data = "";
      for (const line of raw.split("\n")) {
        if (line.startsWith("id:")) id = Number(line.slice(3));
        else if (line.startsWith("data:")) data = line.slice(5);
      }
      if (id >= 0 && data) frames.push({ id, data });
    }
    return frames;
  }
}

export type StreamOpener = (lastSeen: number) => AsyncIterable<string>;

export type ConnectionStatus = "live" | "reconnecting" | "closed";

export interface PumpCallbacks {
  onEvent(event: JobEventWire): void;
  onStatus(status: ConnectionStatus): void;
}

export interface PumpOptions {
  /** Give up after this many reconnect attempts (default 5). */
  maxReconnects?: number;
  /** Called between attempts; override in tests to skip real waiting. */
  wait?: (attempt: number) => Promise<void>;
}

const defaultWait = (attempt: number) =>
  new Promise<void>((resolve) => setTimeout(resolve, Math.min(250 * attempt, 2000)));

/** Drive one job's event stream to its terminal state.
 *
 * Resolves with the last sequence seen. Events arrive strictly in order;
 * anything at or below the reconnect cursor is dropped as a replay.
 */
export async function pumpJobEvents(
  open: StreamOpener,
  callbacks: PumpCallbacks,
  options: PumpOptions = {},
): Promise<number> {
  const maxReconnects = options.maxReconnects ?? 5;
  const wait = options.wait ?? defaultWait;
  let lastSeen = 0;
  let attempt = 0;

  for (;;) {
    try {
      callbacks.onStatus("live");
      const parser = new SseParser();
      for await (const chunk of open(lastSeen)) {
        for (const frame of parser.push(chunk)) {
          const event = JSON.parse(frame.data) as JobEventWire;
          if (event.seq <= lastSeen) continue; // server replay or duplicate
          lastSeen = event.seq;
          callbacks.onEvent(event);
          if (TERMINAL_STATES.has(event.state)) {
            callbacks.onStatus("closed");
            return lastSeen;
          }
        }
      }
      // clean end without a terminal event: the server hit its stream
      // deadline while the job was still running; reconnect from lastSeen
    } catch {
      // dropped connection; fall through to reconnect
    }
    attempt += 1;
    if (attempt > maxReconnects) {
      callbacks.onStatus("closed");
      return lastSeen;
    }
    callbacks.onStatus("reconnecting");
    await wait(attempt);
  }
}
