import { describe, expect, it } from "vitest";
import { SSEParser } from "../src/sse.js";

describe("SSEParser", () => {
  it("yields one payload per double-newline frame", () => {
    const p = new SSEParser();
    expect(p.feed('data: {"a":1}\n\ndata: {"a":2}\n\n')).toEqual(['{"a":1}', '{"a":2}']);
  });

  it("reassembles frames split across chunks at any boundary", () => {
    const message = 'data: {"t_now":1.25,"n":3}\n\n';
    for (let cut = 1; cut < message.length; cut++) {
      const p = new SSEParser();
      const got = [...p.feed(message.slice(0, cut)), ...p.feed(message.slice(cut))];
      expect(got).toEqual(['{"t_now":1.25,"n":3}']);
    }
  });

  it("keeps arrival order across many messages in one chunk", () => {
    const p = new SSEParser();
    const frames = Array.from({ length: 20 }, (_, i) => `data: ${i}\n\n`).join("");
    expect(p.feed(frames)).toEqual(Array.from({ length: 20 }, (_, i) => String(i)));
  });

  it("tolerates CRLF line endings", () => {
    const p = new SSEParser();
    expect(p.feed('data: {"x":1}\r\n\r\n')).toEqual(['{"x":1}']);
  });

  it("ignores comment and retry lines", () => {
    const p = new SSEParser();
    expect(p.feed(": keepalive\n\nretry: 500\ndata: ok\n\n")).toEqual(["ok"]);
  });

  it("holds incomplete frames until terminated", () => {
    const p = new SSEParser();
    expect(p.feed("data: pending\n")).toEqual([]);
    expect(p.feed("\n")).toEqual(["pending"]);
  });
});
