/** Typed client for the session service. The UI never touches analytical
 * state except through these endpoints. */

export interface SessionInfo {
  id: string;
  n: number;
  d: number;
  columns: string[];
  has_labels: boolean;
  model_version: number;
  constraints: number;
  composites: number;
}

export interface ViewPoint {
  row_id: string;
  data_x: number;
  data_y: number;
  bg_x: number;
  bg_y: number;
  selected: boolean;
}

export interface ViewPayload {
  method: "pca" | "ica";
  model_version: number;
  stale: boolean;
  scores: number[];
  directions: number[][];
  warning_flags: string[];
  points: ViewPoint[];
}

export interface FitState {
  state: "idle" | "running" | "done" | "error";
  fit_status: string;
  model_version: number;
  constraints: number;
  log_tail: string[];
  sweeps?: number;
  converged_by?: string;
  max_residual?: number;
  error?: string;
}

export interface AttributeStats {
  name: string;
  mean_selected: number;
  std_selected: number;
  mean_rest: number;
  std_rest: number;
  score: number;
}

export interface SelectionStatsPayload {
  count: number;
  rest_empty: boolean;
  attributes: AttributeStats[];
  jaccard: Record<string, number>;
}

export interface EllipseSpec {
  center: [number, number];
  axis_lengths: [number, number];
  angle: number;
}

export interface EllipsePair {
  selection: EllipseSpec;
  background: EllipseSpec;
}

export interface CreateSessionOptions {
  labelColumn?: string;
  viewMethod?: "pca" | "ica";
  scaleColumns?: boolean;
  timeBudget?: number;
  lambdaTolerance?: number;
  momentTolerance?: number;
  sampleSeed?: number;
  icaSeed?: number;
}

export type ConstraintVariant = "cluster" | "two_d" | "margin" | "one_cluster";

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (typeof body === "string") {
      init.body = body;
      init.headers = { "Content-Type": "text/csv" };
    } else if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const text = await resp.text();
    if (!resp.ok) {
      let detail = text;
      try {
        detail = (JSON.parse(text) as { detail?: string }).detail ?? text;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return (text ? JSON.parse(text) : null) as T;
  }

  createSession(csv: string, opts: CreateSessionOptions = {}): Promise<SessionInfo> {
    const params = new URLSearchParams();
    if (opts.labelColumn !== undefined) params.set("label_column", opts.labelColumn);
    if (opts.viewMethod !== undefined) params.set("view_method", opts.viewMethod);
    if (opts.scaleColumns !== undefined) params.set("scale_columns", String(opts.scaleColumns));
    if (opts.timeBudget !== undefined) params.set("time_budget", String(opts.timeBudget));
    if (opts.lambdaTolerance !== undefined)
      params.set("lambda_tolerance", String(opts.lambdaTolerance));
    if (opts.momentTolerance !== undefined)
      params.set("moment_tolerance", String(opts.momentTolerance));
    if (opts.sampleSeed !== undefined) params.set("sample_seed", String(opts.sampleSeed));
    if (opts.icaSeed !== undefined) params.set("ica_seed", String(opts.icaSeed));
    const query = params.toString();
    return this.request<SessionInfo>("POST", `/sessions${query ? "?" + query : ""}`, csv);
  }

  getSession(sid: string): Promise<SessionInfo> {
    return this.request("GET", `/sessions/${sid}`);
  }

  getView(sid: string, method?: "pca" | "ica"): Promise<ViewPayload> {
    const query = method ? `?method=${method}` : "";
    return this.request("GET", `/sessions/${sid}/view${query}`);
  }

  postSelection(sid: string, rowIds: string[]): Promise<{ count: number }> {
    return this.request("POST", `/sessions/${sid}/selection`, { row_ids: rowIds });
  }

  getSelectionStats(sid: string): Promise<SelectionStatsPayload> {
    return this.request("GET", `/sessions/${sid}/selection/stats`);
  }

  getSelectionEllipses(sid: string, level = 0.95): Promise<EllipsePair> {
    return this.request("GET", `/sessions/${sid}/selection/ellipses?level=${level}`);
  }

  addConstraint(
    sid: string,
    variant: ConstraintVariant,
    rows?: string[],
  ): Promise<{ composites: number; primitives: number; added: number; model_version: number }> {
    return this.request("POST", `/sessions/${sid}/constraints`, { variant, rows: rows ?? null });
  }

  startFit(sid: string): Promise<FitState> {
    return this.request("POST", `/sessions/${sid}/fit`);
  }

  fitStatus(sid: string): Promise<FitState> {
    return this.request("GET", `/sessions/${sid}/fit/status`);
  }

  cancelFit(sid: string): Promise<{ cancelled: boolean }> {
    return this.request("POST", `/sessions/${sid}/fit/cancel`);
  }

  saveGrouping(sid: string, name: string, rowIds: string[]): Promise<{ name: string; count: number }> {
    return this.request("POST", `/sessions/${sid}/groupings`, { name, row_ids: rowIds });
  }

  listGroupings(sid: string): Promise<{ names: string[] }> {
    return this.request("GET", `/sessions/${sid}/groupings`);
  }

  loadGrouping(sid: string, name: string): Promise<{ name: string; row_ids: string[] }> {
    return this.request("GET", `/sessions/${sid}/groupings/${encodeURIComponent(name)}`);
  }

  async exportArchive(sid: string): Promise<string> {
    const resp = await this.fetchFn(`${this.baseUrl}/sessions/${sid}/export`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return resp.text();
  }

  async waitForFit(sid: string, pollMs = 50, timeoutMs = 60_000): Promise<FitState> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const state = await this.fitStatus(sid);
      if (state.state !== "running") return state;
      if (Date.now() > deadline) throw new Error("fit did not finish in time");
      await new Promise((r) => setTimeout(r, pollMs));
    }
  }
}
