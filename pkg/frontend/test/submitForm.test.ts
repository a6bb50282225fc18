import { describe, expect, it } from "vitest";
import {
  addInput,
  canSubmit,
  choosePlugin,
  emptyForm,
  pluginOptions,
  removeInput,
  renderForm,
  setParam,
  submitJob,
} from "../src/submitForm.js";
import { ApiClient } from "../src/api.js";
import type { PluginRow } from "../src/api.js";

const rows: PluginRow[] = [
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

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("pluginOptions", () => {
  it("disables blacklisted plugins and says why", () => {
    const options = pluginOptions(rows);
    expect(options[0]).toEqual({
      id: "word-count",
      label: "word-count",
      disabled: false,
      reason: "",
    });
    expect(options[1].disabled).toBe(true);
    expect(options[1].reason).toContain("blacklisted");
  });
});

describe("canSubmit", () => {
  const options = pluginOptions(rows);

  it("requires a plugin and at least one input", () => {
    let state = emptyForm();
    expect(canSubmit(state, options)).toBe(false);
    state = choosePlugin(state, "word-count");
    expect(canSubmit(state, options)).toBe(false); // no inputs yet
    state = addInput(state, "file-1");
    expect(canSubmit(state, options)).toBe(true);
    state = removeInput(state, "file-1");
    expect(canSubmit(state, options)).toBe(false);
  });

  it("refuses a blacklisted plugin even with inputs", () => {
    const state = addInput(choosePlugin(emptyForm(), "forecast-stub"), "file-1");
    expect(canSubmit(state, options)).toBe(false);
  });

  it("input list ignores duplicates", () => {
    let state = addInput(emptyForm(), "file-1");
    state = addInput(state, "file-1");
    expect(state.inputs).toEqual(["file-1"]);
  });
});

describe("submitJob", () => {
  function formReady() {
    let state = choosePlugin(emptyForm(), "word-count");
    state = addInput(state, "file-1");
    state = setParam(state, "top", "5");
    return state;
  }

  it("sends the documented job body and returns the id on success", async () => {
    let sent: { url: string; body: unknown } | null = null;
    const client = new ApiClient("http://svc", async (url, init) => {
      sent = { url, body: JSON.parse(String(init?.body)) };
      return jsonResponse(200, { job_id: "job-9" });
    });
    const outcome = await submitJob(client, formReady());
    expect(outcome.jobId).toBe("job-9");
    expect(outcome.state.error).toBeNull();
    expect(sent!.url).toBe("http://svc/jobs");
    expect(sent!.body).toEqual({
      plugin_id: "word-count",
      input_refs: ["file-1"],
      params: { top: "5" },
    });
  });

  it("keeps the form intact and surfaces the message when rejected", async () => {
    const client = new ApiClient("http://svc", async () =>
      jsonResponse(409, { code: "rejected", message: "plugin blacklisted" }),
    );
    const before = formReady();
    const outcome = await submitJob(client, before);
    expect(outcome.jobId).toBeNull();
    expect(outcome.state.error).toBe("rejected: plugin blacklisted");
    // everything the user typed is still there
    expect(outcome.state.plugin).toBe(before.plugin);
    expect(outcome.state.inputs).toEqual(before.inputs);
    expect(outcome.state.params).toEqual(before.params);
    expect(outcome.state.submitting).toBe(false);
  });
});

describe("renderForm", () => {
  it("marks disabled options and annotates the reason", () => {
    const html = renderForm(emptyForm(), pluginOptions(rows));
    expect(html).toContain(`value="word-count"`);
    expect(html).toMatch(/value="forecast-stub" disabled/);
    expect(html).toContain("blacklisted after repeated critical failures");
  });

  it("disables the submit button until the form is valid", () => {
    const options = pluginOptions(rows);
    const blank = renderForm(emptyForm(), options);
    expect(blank).toContain("<button type=\"submit\" disabled>");
    const ready = addInput(choosePlugin(emptyForm(), "word-count"), "file-1");
    expect(renderForm(ready, options)).toContain("<button type=\"submit\">");
  });

  it("shows the rejection banner", () => {
    const state = { ...emptyForm(), error: "rejected: plugin blacklisted" };
    expect(renderForm(state, pluginOptions(rows))).toContain("rejected: plugin blacklisted");
  });
});
