/** Typed client for the fdcloud HTTP API.
 *
 * Only the documented routes are used. The session token lives in memory
 * and goes out as a bearer header; nothing is persisted.
 */

export interface LoginResponse {
  token: string;
  user_id: string;
  role: string;
  expires_at: number;
}

export interface UploadResponse {
  file_id: string;
  doc_id: string;
}

export interface SpanWire {
  doc_id: string;
  start: number;
  end: number;
  surface: string;
  concept: string;
  method: string;
  score: number;
}

export interface DocumentPayload {
  id: string;
  uri: string;
  title: string;
  author: string;
  date: string;
  media_type: string;
  text: string;
  tag_ids: string[];
  spans: SpanWire[];
  content_b64: string;
}

export interface SearchHit {
  doc_id: string;
  score: number;
  title: string;
  author: string;
  date: string;
  uri: string;
  tag_ids: string[];
}

export interface TaskWire {
  id: string;
  node_id: string | null;
  state: string;
  inputs: string[];
}

export interface JobStatus {
  id: string;
  state: string;
  plugin_id: string;
  params: Record<string, string>;
  input_refs: string[];
  user_id: string;
  tasks: TaskWire[];
  step_timings: Record<string, number>;
  output_links: string[];
  created_at: number;
  updated_at: number;
  events_seen: number;
}

export interface PluginRow {
  id: string;
  status: string;
  consecutive_critical_failures: number;
  threshold: number;
  accepts_user_jobs: boolean;
}

/** One progress event as serialized into the SSE data field. */
export interface JobEventWire {
  seq: number;
  job_id: string;
  state: string;
  at_ms: number;
  [detail: string]: unknown;
}

export interface SearchParams {
  q: string;
  author?: string;
  dateFrom?: string;
  dateTo?: string;
  limit?: number;
}

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  loggedIn(): boolean {
    return this.token !== null;
  }

  logout(): void {
    this.token = null;
  }

  authHeader(): Record<string, string> {
    return this.token ? { authorization: `Bearer ${this.token}` } : {};
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = { ...this.authHeader() };
    if (body !== undefined) headers["content-type"] = "application/json";
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "http";
      let message = `HTTP ${response.status}`;
      try {
        const payload = (await response.json()) as { code?: string; message?: string };
        if (payload.code) code = payload.code;
        if (payload.message) message = payload.message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const session = await this.request<LoginResponse>("POST", "/login", {
      username,
      password,
    });
    this.token = session.token;
    return session;
  }

  async uploadText(
    text: string,
    meta: Partial<Record<"uri" | "title" | "author" | "date", string>> = {},
  ): Promise<UploadResponse> {
    return this.request("POST", "/documents", { text, ...meta });
  }

  async uploadBase64(
    contentB64: string,
    mediaType: string,
    meta: Partial<Record<"uri" | "title" | "author" | "date", string>> = {},
  ): Promise<UploadResponse> {
    return this.request("POST", "/documents", {
      content_b64: contentB64,
      media_type: mediaType,
      ...meta,
    });
  }

  async getDocument(docId: string): Promise<DocumentPayload> {
    return this.request("GET", `/documents/${encodeURIComponent(docId)}`);
  }

  /** Fetch a job-output link exactly as the server handed it out. */
  async getLink(link: string): Promise<DocumentPayload> {
    return this.request("GET", link);
  }

  async search(params: SearchParams): Promise<SearchHit[]> {
    const query = new URLSearchParams({ q: params.q });
    if (params.author) query.set("author", params.author);
    if (params.dateFrom && params.dateTo) {
      query.set("date_from", params.dateFrom);
      query.set("date_to", params.dateTo);
    }
    if (params.limit !== undefined) query.set("limit", String(params.limit));
    const body = await this.request<{ results: SearchHit[] }>(
      "GET",
      `/search?${query.toString()}`,
    );
    return body.results;
  }

  async createTag(
    docId: string,
    options: { span?: [number, number] } = {},
  ): Promise<{ id: string; doc_id: string }> {
    return this.request("POST", "/tags", { doc_id: docId, ...options });
  }

  async submitJob(spec: {
    plugin_id: string;
    params?: Record<string, string>;
    input_refs: string[];
    output_names?: string[];
  }): Promise<string> {
    const body = await this.request<{ job_id: string }>("POST", "/jobs", spec);
    return body.job_id;
  }

  async getJob(jobId: string): Promise<JobStatus> {
    return this.request("GET", `/jobs/${encodeURIComponent(jobId)}`);
  }

  async listPlugins(): Promise<PluginRow[]> {
    const body = await this.request<{ plugins: PluginRow[] }>("GET", "/plugins");
    return body.plugins;
  }

  async resetPlugin(pluginId: string, force = false): Promise<PluginRow> {
    return this.request(
      "POST",
      `/plugins/${encodeURIComponent(pluginId)}/reset`,
      { force },
    );
  }

  eventsUrl(jobId: string, lastSeen: number): string {
    return `${this.baseUrl}/jobs/${encodeURIComponent(jobId)}/events?last_seen=${lastSeen}`;
  }

  /** Open the progress stream and yield raw chunks as they arrive. */
  async *openEventStream(jobId: string, lastSeen: number): AsyncIterable<string> {
    const response = await this.fetchImpl(this.eventsUrl(jobId, lastSeen), {
      method: "GET",
      headers: this.authHeader(),
    });
    if (!response.ok || response.body === null) {
      throw new ApiError("stream", `event stream failed: ${response.status}`, response.status);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    for (;;) {
      const { done, value } = await reader.read();
      if (done) return;
      yield decoder.decode(value, { stream: true });
    }
  }
}
