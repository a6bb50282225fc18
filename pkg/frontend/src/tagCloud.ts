/** Tag cloud over search results.
 *
 * Weights come from tag frequency across the hits; font size is a
 * monotone function of weight. Clicking an entry narrows the search
 * to documents carrying that tag.
 */

import { ApiClient } from "./api.js";
import type { SearchHit, SearchParams } from "./api.js";

export interface CloudEntry {
  tagId: string;
  count: number;
  /** count / max count, in (0, 1]. */
  weight: number;
}

/** Count tag occurrences across hits; heaviest first, ties by id. */
export function buildTagCloud(hits: SearchHit[]): CloudEntry[] {
  const counts = new Map<string, number>();
  for (const hit of hits) {
    for (const tagId of hit.tag_ids) {
      counts.set(tagId, (counts.get(tagId) ?? 0) + 1);
    }
  }
  if (counts.size === 0) return [];
  const max = Math.max(...counts.values());
  const entries = [...counts.entries()].map(([tagId, count]) => ({
    tagId,
    count,
    weight: count / max,
  }));
  entries.sort((a, b) => b.weight - a.weight || (a.tagId < b.tagId ? -1 : 1));
  return entries;
}

/** Monotone in weight: more weight never yields a smaller font. */
export function fontPx(weight: number): number {
  return 12 + Math.round(16 * weight);
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderTagCloud(entries: CloudEntry[]): string {
  if (!entries.length) {
    return `<div class="tag-cloud empty">no tags in these results</div>`;
  }
  const spans = entries
    .map(
      (entry) =>
        `<button class="tag" data-tag="${escapeHtml(entry.tagId)}" style="font-size:${fontPx(entry.weight)}px">` +
        `${escapeHtml(entry.tagId)}</button>`,
    )
    .join(" ");
  return `<div class="tag-cloud">${spans}</div>`;
}

/** Re-run a search and keep only hits carrying the chosen tag. */
export async function searchScopedToTag(
  client: ApiClient,
  params: SearchParams,
  tagId: string,
): Promise<SearchHit[]> {
  const hits = await client.search(params);
  return hits.filter((hit) => hit.tag_ids.includes(tagId));
}
