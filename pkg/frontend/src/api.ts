/**
 * Thin fetch client for the session service.  The UI talks to the server
 * through this module only; every displayed complex originates from a raw
 * response body kept verbatim for downstream diffing.
 */

export interface ApiResult {
  status: number;
  /** Parsed response body (JSON), or undefined when the body was empty. */
  data: unknown;
  /** The exact response text the server sent. */
  raw: string;
}

/** The server could not be reached at all (connection refused, DNS, …). */
export class OfflineError extends Error {}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<ApiResult> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new OfflineError(`server unreachable: ${String(err)}`);
    }
    const raw = await response.text();
    let data: unknown;
    if (raw) {
      try {
        data = JSON.parse(raw);
      } catch {
        data = undefined;
      }
    }
    return { status: response.status, data, raw };
  }

  health(): Promise<ApiResult> {
    return this.request("GET", "/health");
  }

  createSession(body: unknown): Promise<ApiResult> {
    return this.request("POST", "/sessions", body);
  }

  magnify(sessionId: string, body: unknown): Promise<ApiResult> {
    return this.request("POST", `/sessions/${sessionId}/magnify`, body);
  }

  diagnose(sessionId: string, body: unknown): Promise<ApiResult> {
    return this.request("POST", `/sessions/${sessionId}/diagnose`, body);
  }

  snapshot(sessionId: string): Promise<ApiResult> {
    return this.request("GET", `/sessions/${sessionId}`);
  }
}
