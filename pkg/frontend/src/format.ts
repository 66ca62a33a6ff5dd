// Numbers are displayed exactly as received. String(x) on a parsed JSON
// number is the shortest decimal that round-trips to the same float64, so
// Number(el.textContent) recovers the server's value bit-for-bit. No
// rounding, no toFixed.

export function fmt(x: number): string {
  return String(x);
}

/** Resolve a dotted path ("posterior.mean.a_fb", "sd.0") in a JSON tree. */
export function resolvePath(root: unknown, path: string): unknown {
  let node: unknown = root;
  for (const seg of path.split(".")) {
    if (node === null || typeof node !== "object") return undefined;
    node = (node as Record<string, unknown>)[seg];
  }
  return node;
}
