import type {
  AgreementDoc,
  AnnotationDoc,
  AnnotationPayload,
  ApiErrorBody,
  IncidentDoc,
  IncidentPage,
  RoundDoc,
  SankeyDoc,
  SummaryDoc,
  TaxonomyDoc,
  TrendDoc,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public path: string | null = null,
  ) {
    super(message);
  }
}

/** Raw body text kept alongside the parsed value so callers can byte-compare. */
export interface ApiResult<T> {
  value: T;
  text: string;
}

async function fail(response: Response): Promise<never> {
  let code = "HTTP_ERROR";
  let message = `${response.status} ${response.statusText}`;
  let path: string | null = null;
  try {
    const body = (await response.json()) as ApiErrorBody;
    if (body && body.error) {
      code = body.error.code;
      message = body.error.message;
      path = body.error.path;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, code, message, path);
}

export class ApiClient {
  constructor(
    public baseUrl: string = "",
    public token: string | null = null,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async get<T>(path: string): Promise<ApiResult<T>> {
    const response = await fetch(this.baseUrl + path, { headers: this.headers() });
    if (!response.ok) await fail(response);
    const text = await response.text();
    return { value: JSON.parse(text) as T, text };
  }

  private async post<T>(path: string, body: unknown): Promise<ApiResult<T>> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
    if (!response.ok) await fail(response);
    const text = await response.text();
    return { value: JSON.parse(text) as T, text };
  }

  taxonomy(): Promise<ApiResult<TaxonomyDoc>> {
    return this.get("/api/taxonomy");
  }

  incidents(limit = 100, offset = 0): Promise<ApiResult<IncidentPage>> {
    return this.get(`/api/incidents?offset=${offset}&limit=${limit}`);
  }

  incident(id: string): Promise<ApiResult<IncidentDoc>> {
    return this.get(`/api/incidents/${encodeURIComponent(id)}`);
  }

  rounds(): Promise<ApiResult<RoundDoc[]>> {
    return this.get("/api/rounds");
  }

  round(id: string): Promise<ApiResult<RoundDoc>> {
    return this.get(`/api/rounds/${encodeURIComponent(id)}`);
  }

  submitAnnotation(payload: AnnotationPayload): Promise<ApiResult<AnnotationDoc>> {
    return this.post("/api/annotations", payload);
  }

  annotations(roundId: string, incidentId: string): Promise<ApiResult<AnnotationDoc[]>> {
    const round = encodeURIComponent(roundId);
    const incident = encodeURIComponent(incidentId);
    return this.get(`/api/rounds/${round}/annotations?incident=${incident}`);
  }

  summary(roundId: string): Promise<ApiResult<SummaryDoc>> {
    return this.get(`/api/rounds/${encodeURIComponent(roundId)}/summary`);
  }

  agreement(roundId: string): Promise<ApiResult<AgreementDoc>> {
    return this.get(`/api/rounds/${encodeURIComponent(roundId)}/agreement`);
  }

  sankey(roundId: string, incidentId: string): Promise<ApiResult<SankeyDoc>> {
    const round = encodeURIComponent(roundId);
    const incident = encodeURIComponent(incidentId);
    return this.get(`/api/rounds/${round}/sankey?incident=${incident}`);
  }

  trend(): Promise<ApiResult<TrendDoc>> {
    return this.get("/api/trend");
  }
}
