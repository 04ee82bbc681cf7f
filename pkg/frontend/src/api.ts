// Thin typed client over the envelope protocol. Every call either
// resolves with the data payload or throws ApiFailure carrying the
// error envelope (code/message/field), so callers render field errors
// and busy retries uniformly.

import type {
  AccessionData,
  ApiError,
  AuditEntry,
  Envelope,
  EntityWithNeighbors,
  Meta,
  OperatorRow,
  Report,
  TosecBatchData,
} from "./types.js";

export class ApiFailure extends Error {
  readonly error: ApiError;
  readonly status: number;

  constructor(error: ApiError, status: number) {
    super(error.message);
    this.error = error;
    this.status = status;
  }

  get busy(): boolean {
    return this.error.code === "busy";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchImpl: FetchLike;
  readonly base: string;

  constructor(fetchImpl?: FetchLike, base = "") {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
    this.base = base;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    let body: Envelope<T>;
    try {
      body = (await response.json()) as Envelope<T>;
    } catch {
      throw new ApiFailure(
        { code: "transport", message: `bad response from ${path}` },
        response.status,
      );
    }
    if (!body.ok) {
      throw new ApiFailure(body.error, response.status);
    }
    return body.data;
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>(path);
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  meta(): Promise<Meta> {
    return this.get("/api/meta");
  }

  operators(): Promise<{ rows: OperatorRow[] }> {
    return this.get("/api/operators");
  }

  addOperator(name: string): Promise<{ iri: string; audit: AuditEntry }> {
    return this.post("/api/operators", { name });
  }

  entity(iri: string): Promise<EntityWithNeighbors> {
    return this.get(`/api/entity?iri=${encodeURIComponent(iri)}`);
  }

  audit(iri: string): Promise<{ trail: AuditEntry[] }> {
    return this.get(`/api/audit?iri=${encodeURIComponent(iri)}`);
  }

  byType(label: string, classFilter?: string): Promise<{ rows: { iri: string; label: string }[] }> {
    const filter = classFilter ? `&class_filter=${encodeURIComponent(classFilter)}` : "";
    return this.get(`/api/entities/by-type?label=${encodeURIComponent(label)}${filter}`);
  }

  backlog(): Promise<Report> {
    return this.get("/api/reports/backlog");
  }

  unverified(): Promise<Report> {
    return this.get("/api/reports/unverified");
  }

  consistency(profile?: string): Promise<Report> {
    const suffix = profile ? `?profile=${encodeURIComponent(profile)}` : "";
    return this.get(`/api/reports/consistency${suffix}`);
  }

  submitWorkflow<T = { audit: AuditEntry }>(endpoint: string, payload: unknown): Promise<T> {
    return this.post<T>(`/api/workflows/${endpoint}`, payload);
  }

  accession(payload: unknown): Promise<AccessionData> {
    return this.submitWorkflow<AccessionData>("accession", payload);
  }

  tosecBatch(payload: unknown): Promise<TosecBatchData> {
    return this.post("/api/tosec/batch", payload);
  }

  exportUrl(scope: "live" | "full-history"): string {
    return `${this.base}/api/export?scope=${scope}`;
  }
}
