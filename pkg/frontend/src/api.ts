import type { ForecastDict, Snapshot } from "./types.js";

/** Non-2xx reply; `detail` is the server's message, verbatim. */
export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, detail);
}

/**
 * Client for one session. Configuration is exactly the server URL and the
 * session id; the console never creates or enumerates sessions.
 */
export class SessionClient {
  private base: string;

  constructor(
    serverUrl: string,
    public sessionId: string,
    private fetchImpl: typeof fetch = fetch,
  ) {
    this.base = serverUrl.replace(/\/+$/, "") + "/v1/sessions/" + sessionId;
  }

  streamUrl(limit?: number): string {
    return this.base + "/stream" + (limit !== undefined ? `?limit=${limit}` : "");
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(this.base + path);
    await raiseForStatus(res);
    return (await res.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForStatus(res);
    return (await res.json()) as T;
  }

  posterior(): Promise<Snapshot["posterior"]> {
    return this.getJson("/posterior");
  }

  forecast(hHours?: number): Promise<ForecastDict> {
    const q = hHours !== undefined ? `?h_hours=${hHours}` : "";
    return this.getJson("/forecast" + q);
  }

  whatif(shutinAt: number, hHours?: number): Promise<ForecastDict> {
    let q = `?shutin_at=${shutinAt}`;
    if (hHours !== undefined) q += `&h_hours=${hHours}`;
    return this.getJson("/whatif" + q);
  }

  submitEvents(events: { t: number; m: number }[]): Promise<{ accepted: number; t_now: number }> {
    return this.postJson("/events", { events });
  }

  declareShutin(t: number): Promise<unknown> {
    return this.postJson("/shutin", { t });
  }
}
