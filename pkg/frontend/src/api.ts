/** Typed client for the warnsift labeling service. */

export interface Progress {
  labeled: number;
  positives: number;
  pool: number;
  phase: string;
  stopped: boolean;
}

export interface RankedWarning {
  id: string;
  probability: number;
}

export interface QueryPayload {
  id: string;
  features: Record<string, string>;
  probability: number | null;
  phase: string;
  progress: Progress;
}

export interface SessionHandle {
  session_id: string;
  dataset: string;
  created_at: string;
  status: string;
  learner: string;
  seed: number;
}

export interface CreateSessionOptions {
  dataset: string;
  learner?: string;
  seed?: number;
  stop_recall?: number;
  certainty_switch_threshold?: number;
  batch_size?: number;
  undersampling?: boolean;
  presumptive_negatives?: boolean;
  label_budget?: number | null;
  label_column?: string | null;
  positive_token?: string;
  negative_token?: string;
  deleted_token?: string;
}

export type LabelValue = "actionable" | "unactionable";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `request failed with status ${resp.status}`;
}

export class TriageApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
    return (await resp.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
    return resp.text();
  }

  async listDatasets(): Promise<string[]> {
    const body = await this.request<{ datasets: string[] }>("/v1/datasets");
    return body.datasets;
  }

  createSession(opts: CreateSessionOptions): Promise<SessionHandle> {
    return this.request<SessionHandle>("/v1/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(opts),
    });
  }

  getSession(sessionId: string): Promise<SessionHandle> {
    return this.request<SessionHandle>(`/v1/sessions/${sessionId}`);
  }

  nextQuery(sessionId: string): Promise<QueryPayload> {
    return this.request<QueryPayload>(`/v1/sessions/${sessionId}/next`);
  }

  submitLabel(sessionId: string, id: string, label: LabelValue): Promise<Progress> {
    return this.request<Progress>(`/v1/sessions/${sessionId}/labels`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ id, label }),
    });
  }

  progress(sessionId: string): Promise<Progress & { ranking: RankedWarning[] }> {
    return this.request<Progress & { ranking: RankedWarning[] }>(
      `/v1/sessions/${sessionId}/progress`,
    );
  }

  stop(sessionId: string): Promise<{ status: string; labeled: number }> {
    return this.request<{ status: string; labeled: number }>(
      `/v1/sessions/${sessionId}/stop`,
      { method: "POST" },
    );
  }

  exportCsv(sessionId: string): Promise<string> {
    return this.requestText(`/v1/sessions/${sessionId}/export`);
  }
}
