/**
 * Typed client for the causal-advisor HTTP service.
 *
 * All model arithmetic happens on the server; this module only moves JSON.
 * The base URL is the client's single piece of configuration.
 */

export interface ServiceConfig {
  nodes: string[];
  outcome: string;
  actionable: string[];
  threshold_z: number;
  threshold_raw: number;
  has_normalization: boolean;
  observation_count: number;
}

export interface ObservationRow {
  id: number;
  values: Record<string, number>;
  raw_values: Record<string, number>;
  outcome: number;
  outcome_raw: number;
  passes: boolean;
}

export interface CounterfactualRequest {
  observation_id?: number;
  values?: Record<string, number>;
  interventions: Record<string, number>;
}

export interface CounterfactualResponse {
  counterfactual_values: Record<string, number>;
  raw_values: Record<string, number>;
  outcome: number;
  outcome_raw: number;
  passes: boolean;
  abducted_noise: Record<string, number>;
}

export interface RecommendRequest {
  observation_id?: number;
  values?: Record<string, number>;
  actionable?: string[];
  mode?: "all" | "single";
}

export interface RecommendResponse {
  intervention: Record<string, number>;
  intervention_raw: Record<string, number>;
  empty: boolean;
  predicted_outcome: number;
  predicted_outcome_raw: number;
  passes: boolean;
  norm_of_change: number;
}

/** Error carrying the HTTP status and the server's detail message. */
export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function parseOrThrow<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = `${res.status} ${res.statusText}`;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status-line fallback
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    return parseOrThrow<T>(await fetch(`${this.baseUrl}${path}`));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return parseOrThrow<T>(res);
  }

  getConfig(): Promise<ServiceConfig> {
    return this.get("/api/config");
  }

  getObservations(): Promise<ObservationRow[]> {
    return this.get("/api/observations");
  }

  counterfactual(req: CounterfactualRequest): Promise<CounterfactualResponse> {
    return this.post("/api/counterfactual", req);
  }

  recommend(req: RecommendRequest): Promise<RecommendResponse> {
    return this.post("/api/recommend", req);
  }
}
