import { ApiError, SessionClient } from "./api.js";
import { renderConsole, type Handlers } from "./panes.js";
import { applySnapshot, initialState, type ConsoleState } from "./state.js";
import { openStream, type StreamHandle } from "./sse.js";
import type { Snapshot, SubmittedEvent } from "./types.js";

function errorText(err: unknown): string {
  // 409/400 rejections are shown with the server's wording, unchanged
  if (err instanceof ApiError) return err.detail;
  return err instanceof Error ? err.message : String(err);
}

export interface ControllerOpts {
  fetchImpl?: typeof fetch;
  now?: () => number;
}

/**
 * One console = one session. Commands go out as plain requests; pane
 * content only ever changes when the next snapshot arrives on the stream
 * (no optimistic updates), except for the what-if block, which is an
 * explicit query-response view.
 */
export class ConsoleController {
  state: ConsoleState;
  private readonly fetchImpl: typeof fetch;
  private readonly now: () => number;
  private container: HTMLElement | null = null;
  private stream: StreamHandle | null = null;
  private clock: ReturnType<typeof setInterval> | null = null;
  private pendingEcho: SubmittedEvent[] = [];
  private readonly handlers: Handlers;

  constructor(
    private client: SessionClient,
    opts: ControllerOpts = {},
  ) {
    this.fetchImpl = opts.fetchImpl ?? fetch;
    this.now = opts.now ?? Date.now;
    this.state = initialState(client.sessionId);
    this.handlers = {
      onSubmitEvent: (t, m) => void this.submitEvent(t, m),
      onDeclareShutin: (t) => void this.declareShutin(t),
      onWhatif: (t) => void this.queryWhatif(t),
    };
  }

  mount(container: HTMLElement, clockMs = 1000): void {
    this.container = container;
    this.render();
    // the stale banner needs a clock even when no messages arrive
    this.clock = setInterval(() => this.render(), clockMs);
  }

  unmount(): void {
    if (this.clock !== null) clearInterval(this.clock);
    this.clock = null;
    this.stream?.close();
    this.stream = null;
    this.container = null;
  }

  connect(limit?: number): Promise<void> {
    this.stream?.close();
    this.state = { ...this.state, connection: "connecting" };
    this.render();
    const stream = openStream(
      this.client.streamUrl(limit),
      (data) => this.handleSnapshot(JSON.parse(data) as Snapshot),
      this.fetchImpl,
    );
    this.stream = stream;
    return stream.done.then(
      () => {
        this.state = { ...this.state, connection: "closed" };
        this.render();
      },
      (err) => {
        this.state = { ...this.state, connection: "error" };
        this.render();
        throw err;
      },
    );
  }

  /** Stream messages are applied strictly in arrival order. */
  handleSnapshot(snap: Snapshot): void {
    if (this.pendingEcho.length > 0) {
      this.state = {
        ...this.state,
        submitted: [...this.state.submitted, ...this.pendingEcho],
      };
      this.pendingEcho = [];
    }
    this.state = applySnapshot(this.state, snap, this.now());
    this.render();
  }

  async submitEvent(t: number, m: number): Promise<void> {
    try {
      await this.client.submitEvents([{ t, m }]);
      // accepted: echo it on the panes once the resulting snapshot arrives
      this.pendingEcho.push({ t, m });
      this.setError("event", undefined);
    } catch (err) {
      this.setError("event", errorText(err));
    }
  }

  async declareShutin(t: number): Promise<void> {
    try {
      await this.client.declareShutin(t);
      this.setError("shutin", undefined);
      // the mode badge flips when the post-shut-in snapshot streams in
    } catch (err) {
      this.setError("shutin", errorText(err));
    }
  }

  async queryWhatif(t: number): Promise<void> {
    const latest = this.state.latest;
    if (latest && t < latest.t_now) {
      this.setError(
        "whatif",
        `shut-in time ${t} is in the past; pick t at or after t_now = ${latest.t_now}`,
      );
      return;
    }
    try {
      const forecast = await this.client.whatif(t);
      this.state = {
        ...this.state,
        whatif: { shutinAt: t, forecast },
        errors: { ...this.state.errors, whatif: undefined },
      };
      this.render();
    } catch (err) {
      this.setError("whatif", errorText(err));
    }
  }

  private setError(key: "event" | "shutin" | "whatif", message: string | undefined): void {
    this.state = { ...this.state, errors: { ...this.state.errors, [key]: message } };
    this.render();
  }

  render(): void {
    if (this.container) {
      renderConsole(this.container, this.state, this.handlers, this.now());
    }
  }
}
