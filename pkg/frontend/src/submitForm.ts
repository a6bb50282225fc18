/** Submit-job form: plugin picker, input list, validation, submission.
 *
 * State transitions are pure functions so tests can drive the form
 * without a DOM. Submission failures keep the form state intact and
 * surface the server's message; success hands back the job id for
 * navigation to the progress view.
 */

import { ApiClient, ApiError } from "./api.js";
import type { PluginRow } from "./api.js";

export interface PluginOption {
  id: string;
  label: string;
  disabled: boolean;
  /** Why the option is disabled, shown next to it. Empty when enabled. */
  reason: string;
}

export interface SubmitFormState {
  plugin: string | null;
  inputs: string[];
  params: Record<string, string>;
  error: string | null;
  submitting: boolean;
}

export function emptyForm(): SubmitFormState {
  return { plugin: null, inputs: [], params: {}, error: null, submitting: false };
}

export function pluginOptions(rows: PluginRow[]): PluginOption[] {
  return rows.map((row) => {
    let reason = "";
    if (row.status === "Blacklisted") {
      reason = "blacklisted after repeated critical failures";
    } else if (!row.accepts_user_jobs) {
      reason = "not accepting jobs";
    }
    return {
      id: row.id,
      label: row.id,
      disabled: reason !== "",
      reason,
    };
  });
}

export function choosePlugin(state: SubmitFormState, pluginId: string): SubmitFormState {
  return { ...state, plugin: pluginId, error: null };
}

export function addInput(state: SubmitFormState, fileId: string): SubmitFormState {
  if (state.inputs.includes(fileId)) return state;
  return { ...state, inputs: [...state.inputs, fileId] };
}

export function removeInput(state: SubmitFormState, fileId: string): SubmitFormState {
  return { ...state, inputs: state.inputs.filter((id) => id !== fileId) };
}

export function setParam(state: SubmitFormState, key: string, value: string): SubmitFormState {
  return { ...state, params: { ...state.params, [key]: value } };
}

/** The submit button is enabled only for a selectable plugin with inputs. */
export function canSubmit(state: SubmitFormState, options: PluginOption[]): boolean {
  if (state.submitting || !state.plugin || state.inputs.length === 0) return false;
  const option = options.find((opt) => opt.id === state.plugin);
  return option !== undefined && !option.disabled;
}

export interface SubmitOutcome {
  state: SubmitFormState;
  /** Set on success; the caller navigates to the progress view. */
  jobId: string | null;
}

export async function submitJob(
  client: ApiClient,
  state: SubmitFormState,
): Promise<SubmitOutcome> {
  const pending = { ...state, submitting: true, error: null };
  try {
    const jobId = await client.submitJob({
      plugin_id: pending.plugin!,
      input_refs: pending.inputs,
      params: pending.params,
    });
    return { state: { ...pending, submitting: false }, jobId };
  } catch (err) {
    // rejection leaves the selected plugin, inputs, and params untouched
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    return { state: { ...pending, submitting: false, error: message }, jobId: null };
  }
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderForm(state: SubmitFormState, options: PluginOption[]): string {
  const rows = options
    .map((opt) => {
      const selected = opt.id === state.plugin ? " checked" : "";
      const disabled = opt.disabled ? " disabled" : "";
      const note = opt.reason
        ? ` <span class="reason">${escapeHtml(opt.reason)}</span>`
        : "";
      return (
        `<label class="plugin-option"><input type="radio" name="plugin" value="${escapeHtml(opt.id)}"${selected}${disabled}>` +
        `${escapeHtml(opt.label)}${note}</label>`
      );
    })
    .join("");
  const inputs = state.inputs
    .map((id) => `<li data-file="${escapeHtml(id)}">${escapeHtml(id)}</li>`)
    .join("");
  const submitDisabled = canSubmit(state, options) ? "" : " disabled";
  const error = state.error
    ? `<div class="banner error">${escapeHtml(state.error)}</div>`
    : "";
  return [
    `<fieldset class="plugins">${rows}</fieldset>`,
    `<ul class="inputs">${inputs}</ul>`,
    error,
    `<button type="submit"${submitDisabled}>Submit job</button>`,
  ]
    .filter((piece) => piece !== "")
    .join("\n");
}
