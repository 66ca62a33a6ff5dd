// SVG chart builders. Input is always a tabulated series straight from the
// server (grid axes, pmf, ccdf, snapshot history); the only arithmetic here
// is the affine map from data coordinates to pixels. No densities, no
// quantiles, no smoothing.

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartOpts {
  width?: number;
  height?: number;
  /** "zero" anchors the y axis at 0 (densities, pmfs); "fit" spans the data */
  yDomain?: "zero" | "fit";
  className?: string;
}

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  if (span === 0) return () => (r0 + r1) / 2;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

function svgRoot(width: number, height: number, className: string): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", className);
  return svg;
}

const PAD = 6;

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Single polyline over (xs, ys). Used for marginals, the ccdf, and series. */
export function lineChart(xs: number[], ys: number[], opts: ChartOpts = {}): SVGSVGElement {
  const w = opts.width ?? 220;
  const h = opts.height ?? 90;
  const svg = svgRoot(w, h, opts.className ?? "chart line-chart");
  if (xs.length === 0) return svg;
  const [x0, x1] = extent(xs);
  let [y0, y1] = extent(ys);
  if ((opts.yDomain ?? "zero") === "zero") y0 = Math.min(0, y0);
  const sx = linearScale(x0, x1, PAD, w - PAD);
  const sy = linearScale(y0, y1, h - PAD, PAD);
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    xs.map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`).join(" "),
  );
  line.setAttribute("fill", "none");
  svg.appendChild(line);
  return svg;
}

/**
 * Multiple named series over a shared x (the mean/map and correlation
 * time-series panes). Each polyline carries class "series-<name>".
 */
export function multiLineChart(
  xs: number[],
  series: { name: string; ys: number[] }[],
  opts: ChartOpts = {},
): SVGSVGElement {
  const w = opts.width ?? 360;
  const h = opts.height ?? 110;
  const svg = svgRoot(w, h, opts.className ?? "chart multi-line-chart");
  if (xs.length === 0 || series.length === 0) return svg;
  const [x0, x1] = extent(xs);
  const all = series.flatMap((s) => s.ys);
  let [y0, y1] = extent(all);
  if ((opts.yDomain ?? "fit") === "zero") y0 = Math.min(0, y0);
  const sx = linearScale(x0, x1, PAD, w - PAD);
  const sy = linearScale(y0, y1, h - PAD, PAD);
  for (const s of series) {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute(
      "points",
      xs.map((x, i) => `${sx(x).toFixed(2)},${sy(s.ys[i]).toFixed(2)}`).join(" "),
    );
    line.setAttribute("fill", "none");
    line.setAttribute("class", `series-${s.name}`);
    svg.appendChild(line);
  }
  return svg;
}

/**
 * Probability bars over counts k = 0..pmf.length-1. Bars inside the
 * inclusive [band[0], band[1]] interval carry class "in-band". An optional
 * observed count is drawn as a vertical rule.
 */
export function pmfBarChart(
  pmf: number[],
  band: [number, number],
  opts: ChartOpts & { observed?: number } = {},
): SVGSVGElement {
  const w = opts.width ?? 360;
  const h = opts.height ?? 120;
  const svg = svgRoot(w, h, opts.className ?? "chart pmf-chart");
  const n = pmf.length;
  if (n === 0) return svg;
  const [, pMax] = extent(pmf);
  const sy = linearScale(0, pMax === 0 ? 1 : pMax, h - PAD, PAD);
  const slot = (w - 2 * PAD) / n;
  const barW = Math.max(1, slot * 0.85);
  for (let k = 0; k < n; k++) {
    const rect = document.createElementNS(SVG_NS, "rect");
    const top = sy(pmf[k]);
    rect.setAttribute("x", (PAD + k * slot).toFixed(2));
    rect.setAttribute("y", top.toFixed(2));
    rect.setAttribute("width", barW.toFixed(2));
    rect.setAttribute("height", (h - PAD - top).toFixed(2));
    rect.setAttribute("data-k", String(k));
    rect.setAttribute("class", k >= band[0] && k <= band[1] ? "bar in-band" : "bar");
    svg.appendChild(rect);
  }
  if (opts.observed !== undefined && opts.observed < n) {
    const x = PAD + opts.observed * slot + barW / 2;
    const rule = document.createElementNS(SVG_NS, "line");
    rule.setAttribute("x1", x.toFixed(2));
    rule.setAttribute("x2", x.toFixed(2));
    rule.setAttribute("y1", String(PAD));
    rule.setAttribute("y2", String(h - PAD));
    rule.setAttribute("class", "observed-count");
    svg.appendChild(rule);
  }
  return svg;
}

/**
 * Exceedance curve with the asymmetric credible endpoints as vertical rules
 * and operator-observed magnitudes as ticks on the baseline.
 */
export function ccdfChart(
  mesh: number[],
  ccdf: number[],
  credible: [number, number],
  observed: number[] = [],
  opts: ChartOpts = {},
): SVGSVGElement {
  const w = opts.width ?? 360;
  const h = opts.height ?? 120;
  const svg = svgRoot(w, h, opts.className ?? "chart ccdf-chart");
  if (mesh.length === 0) return svg;
  const [x0, x1] = extent(mesh);
  const sx = linearScale(x0, x1, PAD, w - PAD);
  const sy = linearScale(0, 1, h - PAD, PAD);
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    mesh.map((m, i) => `${sx(m).toFixed(2)},${sy(ccdf[i]).toFixed(2)}`).join(" "),
  );
  line.setAttribute("fill", "none");
  svg.appendChild(line);
  for (const [which, m] of [
    ["credible-lo", credible[0]],
    ["credible-hi", credible[1]],
  ] as const) {
    const rule = document.createElementNS(SVG_NS, "line");
    const x = sx(m);
    rule.setAttribute("x1", x.toFixed(2));
    rule.setAttribute("x2", x.toFixed(2));
    rule.setAttribute("y1", String(PAD));
    rule.setAttribute("y2", String(h - PAD));
    rule.setAttribute("class", which);
    svg.appendChild(rule);
  }
  for (const m of observed) {
    if (m < x0 || m > x1) continue;
    const tick = document.createElementNS(SVG_NS, "line");
    const x = sx(m);
    tick.setAttribute("x1", x.toFixed(2));
    tick.setAttribute("x2", x.toFixed(2));
    tick.setAttribute("y1", String(h - PAD));
    tick.setAttribute("y2", String(h - PAD - 8));
    tick.setAttribute("class", "observed-mag");
    svg.appendChild(tick);
  }
  return svg;
}
