import type { Answer, SessionConfig, SessionStateJson } from "./types.js";

/** Error carrying the service's HTTP status and detail message. */
export class ApiError extends Error {
  constructor(public readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client for the session service; no local inference. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body?.detail === "string"
          ? body.detail
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  createSession(
    source: { dpi?: string; fixture?: string; netlist?: string },
    config: SessionConfig = {},
  ): Promise<SessionStateJson> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ ...source, config }),
    });
  }

  getSession(id: string): Promise<SessionStateJson> {
    return this.request(`/sessions/${id}`);
  }

  answer(id: string, answer: Answer): Promise<SessionStateJson> {
    return this.request(`/sessions/${id}/answer`, {
      method: "POST",
      body: JSON.stringify({ answer }),
    });
  }

  transcript(id: string): Promise<unknown[]> {
    return this.request(`/sessions/${id}/transcript`);
  }
}
