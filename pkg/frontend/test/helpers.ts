import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { expect } from "vitest";
import { resolvePath } from "../src/format.js";
import type { Snapshot } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export function fixture<T = Snapshot>(name: string): T {
  return JSON.parse(fixtureText(name)) as T;
}

/**
 * Check that every [data-src] readout under `root` reproduces its source
 * value bit-for-bit: Number(textContent) must be the same float64 as the
 * one in the JSON document named by the nearest [data-root] ancestor.
 */
export function expectExactNumbers(
  root: HTMLElement,
  docs: Record<string, unknown>,
): number {
  const nodes = root.querySelectorAll<HTMLElement>("[data-src]");
  let checked = 0;
  for (const node of nodes) {
    const scope = node.closest<HTMLElement>("[data-root]");
    expect(scope, "readout outside any data-root scope").not.toBeNull();
    const docName = scope!.getAttribute("data-root")!;
    const doc = docs[docName];
    expect(doc, `no document registered for data-root=${docName}`).toBeDefined();
    const path = node.getAttribute("data-src")!;
    const want = resolvePath(doc, path);
    expect(typeof want, `${docName}.${path} missing in server JSON`).toBe("number");
    const shown = Number(node.textContent);
    expect(
      Object.is(shown, want),
      `${docName}.${path}: displayed ${node.textContent}, server ${want}`,
    ).toBe(true);
    checked += 1;
  }
  return checked;
}
