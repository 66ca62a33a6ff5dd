// Minimal server-sent-events reader over fetch. The service frames each
// snapshot as one "data: <json>" message; we do not need event ids, retry
// hints, or EventSource's auto-reconnect (the controller handles that).

export class SSEParser {
  private buffer = "";

  /** Feed a decoded chunk; returns the data payloads of completed messages. */
  feed(chunk: string): string[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const out: string[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n\n")) >= 0) {
      const frame = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 2);
      const data = frame
        .split("\n")
        .filter((line) => line.startsWith("data:"))
        .map((line) => (line.startsWith("data: ") ? line.slice(6) : line.slice(5)))
        .join("\n");
      if (data) out.push(data);
    }
    return out;
  }
}

export interface StreamHandle {
  done: Promise<void>;
  close(): void;
}

/**
 * Open the stream and invoke onMessage for every payload, in arrival order.
 * The returned promise resolves when the server closes the stream and
 * rejects on network failure.
 */
export function openStream(
  url: string,
  onMessage: (data: string) => void,
  fetchImpl: typeof fetch = fetch,
): StreamHandle {
  const controller = new AbortController();
  const done = (async () => {
    const res = await fetchImpl(url, {
      signal: controller.signal,
      headers: { accept: "text/event-stream" },
    });
    if (!res.ok || !res.body) {
      throw new Error(`stream failed: HTTP ${res.status}`);
    }
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    const parser = new SSEParser();
    for (;;) {
      const { done: eof, value } = await reader.read();
      if (eof) break;
      for (const payload of parser.feed(decoder.decode(value, { stream: true }))) {
        onMessage(payload);
      }
    }
  })();
  return {
    done,
    close: () => controller.abort(),
  };
}
