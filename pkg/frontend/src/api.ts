import type {
  Acf,
  AutoOptions,
  DecompositionResult,
  ErrorEnvelope,
  ForecastResponse,
  Health,
  ResidualSeries,
  RunsTest,
  SessionCreated,
  SessionDetail,
  SessionExport,
  StepResponse,
  UndoResponse,
} from "./types.js";

/** Error raised when the service responds with a non-2xx status. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: string;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message);
    this.name = "ApiError";
    this.status = status;
    this.code = envelope.code;
    this.detail = envelope.detail;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function toApiError(response: Response): Promise<ApiError> {
  let envelope: ErrorEnvelope = {
    code: "unknown_error",
    message: `HTTP ${response.status}`,
    detail: "",
  };
  try {
    const body = await response.json();
    if (body && typeof body.code === "string" && typeof body.message === "string") {
      envelope = { code: body.code, message: body.message, detail: body.detail ?? "" };
    }
  } catch {
    // Non-JSON error body: keep the generic envelope.
  }
  return new ApiError(response.status, envelope);
}

/** Typed client for the /v1 decomposition session API. */
export class DecompClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: BodyInit, contentType?: string): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = body;
      init.headers = { "content-type": contentType ?? "application/json" };
    }
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<Health> {
    return this.request("GET", "/v1/health");
  }

  createSession(csv: string): Promise<SessionCreated> {
    return this.request("POST", "/v1/sessions", csv, "text/csv");
  }

  getSession(id: string): Promise<SessionDetail> {
    return this.request("GET", `/v1/sessions/${id}`);
  }

  addStep(id: string, band: string, family: string, params: Record<string, unknown> | "auto" = "auto"): Promise<StepResponse> {
    return this.request("POST", `/v1/sessions/${id}/steps`, JSON.stringify({ band, family, params }));
  }

  undoLastStep(id: string): Promise<UndoResponse> {
    return this.request("DELETE", `/v1/sessions/${id}/steps/last`);
  }

  getResidual(id: string): Promise<ResidualSeries> {
    return this.request("GET", `/v1/sessions/${id}/residual`);
  }

  getAcf(id: string, maxLag = 30): Promise<Acf> {
    return this.request("GET", `/v1/sessions/${id}/acf?max_lag=${maxLag}`);
  }

  getRunsTest(id: string): Promise<RunsTest> {
    return this.request("GET", `/v1/sessions/${id}/runs-test`);
  }

  forecast(id: string, horizon: number, actual?: number[]): Promise<ForecastResponse> {
    const body: Record<string, unknown> = { horizon };
    if (actual !== undefined) {
      body.actual = actual;
    }
    return this.request("POST", `/v1/sessions/${id}/forecast`, JSON.stringify(body));
  }

  exportSession(id: string): Promise<SessionExport> {
    return this.request("GET", `/v1/sessions/${id}/export`);
  }

  autoDecompose(csv: string, options: AutoOptions = {}): Promise<DecompositionResult> {
    return this.request("POST", "/v1/auto", JSON.stringify({ csv, ...options }));
  }
}
