/** Browser entry point. Wires the pure view modules to the DOM.
 *
 * All state updates funnel through a single UpdateQueue; each panel is
 * re-rendered from its state object after every applied update.
 */

import { ApiClient, ApiError } from "./api.js";
import type { PluginRow, SearchHit } from "./api.js";
import { pumpJobEvents, SseParser } from "./sse.js";
import {
  applyConnection,
  applyEvent,
  emptyJobView,
  renderJobView,
  renderTimingBars,
  timingBars,
  type JobView,
} from "./jobView.js";
import {
  addInput,
  canSubmit,
  choosePlugin,
  emptyForm,
  pluginOptions,
  renderForm,
  submitJob,
  type SubmitFormState,
} from "./submitForm.js";
import { buildTagCloud, renderTagCloud, searchScopedToTag } from "./tagCloud.js";
import {
  appendNotification,
  renderNotifications,
  UpdateQueue,
  type Notification,
} from "./appState.js";

const queue = new UpdateQueue();
const client = new ApiClient(window.location.origin);

let form: SubmitFormState = emptyForm();
let plugins: PluginRow[] = [];
let hits: SearchHit[] = [];
let job: JobView | null = null;
let notifications: Notification[] = [];
let lastQuery = "";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function paint(): void {
  el("plugins-and-form").innerHTML = renderForm(form, pluginOptions(plugins));
  el("tag-cloud").innerHTML = renderTagCloud(buildTagCloud(hits));
  el("results").innerHTML = hits
    .map(
      (hit) =>
        `<li data-doc="${hit.doc_id}"><strong>${hit.title}</strong> ` +
        `<span class="score">${hit.score.toFixed(3)}</span></li>`,
    )
    .join("");
  el("notifications").innerHTML = renderNotifications(notifications);
  if (job) {
    el("job").innerHTML = renderJobView(job);
  }
}

async function refreshPlugins(): Promise<void> {
  const rows = await client.listPlugins();
  await queue.push(() => {
    plugins = rows;
    paint();
  });
}

async function runSearch(q: string): Promise<void> {
  const found = await client.search({ q });
  await queue.push(() => {
    lastQuery = q;
    hits = found;
    paint();
  });
}

async function refreshJob(jobId: string): Promise<void> {
  const status = await client.getJob(jobId);
  el("timings").innerHTML = renderTimingBars(timingBars(status.step_timings));
}

function watchJob(jobId: string, plugin: string): void {
  void queue.push(() => {
    job = emptyJobView(jobId, plugin);
    paint();
  });
  const open = (lastSeen: number) => streamChunks(jobId, lastSeen);
  void pumpJobEvents(open, {
    onEvent: (event) =>
      void queue.push(() => {
        if (!job) return;
        job = applyEvent(job, event);
        notifications = appendNotification(notifications, event);
        paint();
        if (job.terminal) void refreshJob(jobId);
      }),
    onStatus: (status) =>
      void queue.push(() => {
        if (!job) return;
        job = applyConnection(job, status);
        paint();
      }),
  });
}

async function* streamChunks(jobId: string, lastSeen: number): AsyncIterable<string> {
  for await (const chunk of client.openEventStream(jobId, lastSeen)) {
    yield chunk;
  }
}

function bind(): void {
  el("login-form").addEventListener("submit", (evt) => {
    evt.preventDefault();
    const user = (el("login-user") as HTMLInputElement).value;
    const password = (el("login-password") as HTMLInputElement).value;
    void client
      .login(user, password)
      .then(() => {
        el("login").hidden = true;
        el("workspace").hidden = false;
        return refreshPlugins();
      })
      .catch((err) => {
        el("login-error").textContent =
          err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      });
  });

  el("upload-form").addEventListener("submit", (evt) => {
    evt.preventDefault();
    const text = (el("upload-text") as HTMLTextAreaElement).value;
    const title = (el("upload-title") as HTMLInputElement).value || "untitled";
    void client.uploadText(text, { title }).then((res) =>
      queue.push(() => {
        form = addInput(form, res.file_id);
        paint();
      }),
    );
  });

  el("search-form").addEventListener("submit", (evt) => {
    evt.preventDefault();
    const q = (el("search-q") as HTMLInputElement).value;
    void runSearch(q);
  });

  el("tag-cloud").addEventListener("click", (evt) => {
    const target = evt.target as HTMLElement;
    const tagId = target.dataset["tag"];
    if (!tagId) return;
    void searchScopedToTag(client, { q: lastQuery }, tagId).then((scoped) =>
      queue.push(() => {
        hits = scoped;
        paint();
      }),
    );
  });

  el("plugins-and-form").addEventListener("change", (evt) => {
    const target = evt.target as HTMLInputElement;
    if (target.name !== "plugin") return;
    void queue.push(() => {
      form = choosePlugin(form, target.value);
      paint();
    });
  });

  el("plugins-and-form").addEventListener("click", (evt) => {
    const target = evt.target as HTMLElement;
    if (target.tagName !== "BUTTON") return;
    evt.preventDefault();
    if (!canSubmit(form, pluginOptions(plugins))) return;
    void submitJob(client, form).then((outcome) =>
      queue.push(() => {
        form = outcome.state;
        paint();
        if (outcome.jobId) watchJob(outcome.jobId, form.plugin ?? "");
      }),
    );
  });
}

bind();
// re-exported so the page can be driven from the console when debugging
export { client, SseParser };
