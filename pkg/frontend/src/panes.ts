import { ccdfChart, lineChart, multiLineChart, pmfBarChart } from "./charts.js";
import { fmt } from "./format.js";
import { isStale, type ConsoleState } from "./state.js";
import { PARAM_NAMES, type ForecastDict, type ParamName, type Snapshot } from "./types.js";

// Every numeric readout is tagged with data-src, the dotted path of the
// value in the JSON document it came from; the nearest ancestor [data-root]
// names that document ("snapshot" or "whatif"). That makes the no-client-
// math property auditable: each displayed number can be traced to, and must
// equal, one server-sent value.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function num(path: string, value: number, className = "num"): HTMLSpanElement {
  const span = el("span", className, fmt(value));
  span.setAttribute("data-src", path);
  return span;
}

function readout(label: string, path: string, value: number): HTMLDivElement {
  const row = el("div", "readout");
  row.appendChild(el("span", "label", label));
  row.appendChild(num(path, value));
  return row;
}

const PARAM_LABELS: Record<ParamName, string> = {
  a_fb: "a_fb (activation feedback)",
  b: "b (size ratio)",
  tau: "tau (relaxation time, d)",
};

function marginalBlock(snap: Snapshot, name: ParamName, idx: number): HTMLElement {
  const post = snap.posterior;
  const block = el("div", `marginal marginal-${name}`);
  const head = el("h3", undefined, PARAM_LABELS[name]);
  if (name === "tau" && snap.likelihood_mode === "partial") {
    head.appendChild(el("span", "badge tau-prior-badge", "prior (not yet identified)"));
  }
  block.appendChild(head);
  block.appendChild(
    lineChart(post.axes[name], post.marginals[name], { className: "chart marginal-chart" }),
  );
  const axis = el("div", "axis-range");
  const last = post.axes[name].length - 1;
  axis.appendChild(num(`posterior.axes.${name}.0`, post.axes[name][0], "num axis-lo"));
  axis.appendChild(num(`posterior.axes.${name}.${last}`, post.axes[name][last], "num axis-hi"));
  block.appendChild(axis);
  block.appendChild(readout("mean", `posterior.mean.${name}`, post.mean[name]));
  block.appendChild(readout("map", `posterior.map.${name}`, post.map[name]));
  block.appendChild(readout("sd", `posterior.sd.${idx}`, post.sd[idx]));
  return block;
}

function seriesCharts(history: Snapshot[]): HTMLElement {
  const wrap = el("div", "series-panes");
  const ts = history.map((s) => s.t_now);
  for (const name of PARAM_NAMES) {
    const block = el("div", `series series-${name}`);
    block.appendChild(el("h4", undefined, `${name}: mean and map over time`));
    block.appendChild(
      multiLineChart(ts, [
        { name: "mean", ys: history.map((s) => s.posterior.mean[name]) },
        { name: "map", ys: history.map((s) => s.posterior.map[name]) },
      ]),
    );
    wrap.appendChild(block);
  }
  const corrBlock = el("div", "series series-corr");
  corrBlock.appendChild(el("h4", undefined, "posterior correlations over time"));
  corrBlock.appendChild(
    multiLineChart(ts, [
      { name: "corr-a-b", ys: history.map((s) => s.posterior.corr[0][1]) },
      { name: "corr-a-tau", ys: history.map((s) => s.posterior.corr[0][2]) },
      { name: "corr-b-tau", ys: history.map((s) => s.posterior.corr[1][2]) },
    ]),
  );
  const latest = history[history.length - 1];
  const legend = el("div", "corr-readouts");
  legend.appendChild(readout("corr(a_fb, b)", "posterior.corr.0.1", latest.posterior.corr[0][1]));
  legend.appendChild(
    readout("corr(a_fb, tau)", "posterior.corr.0.2", latest.posterior.corr[0][2]),
  );
  legend.appendChild(readout("corr(b, tau)", "posterior.corr.1.2", latest.posterior.corr[1][2]));
  corrBlock.appendChild(legend);
  wrap.appendChild(corrBlock);
  return wrap;
}

export function renderPosteriorPane(state: ConsoleState): HTMLElement {
  const pane = el("section", "pane posterior-pane");
  pane.id = "posterior-pane";
  pane.setAttribute("data-root", "snapshot");
  const snap = state.latest;
  if (!snap) {
    pane.appendChild(el("p", "placeholder", "waiting for the first snapshot"));
    return pane;
  }
  const head = el("div", "pane-head");
  head.appendChild(el("h2", undefined, "posterior"));
  const badge = el("span", `badge mode-badge mode-${snap.likelihood_mode}`);
  badge.id = "mode-badge";
  badge.textContent = `${snap.likelihood_mode} likelihood`;
  head.appendChild(badge);
  pane.appendChild(head);

  const status = el("div", "session-status");
  status.appendChild(readout("t_now (d)", "t_now", snap.t_now));
  status.appendChild(readout("events", "n_events", snap.n_events));
  if (snap.shut_in !== null) {
    status.appendChild(readout("shut-in (d)", "shut_in", snap.shut_in));
  }
  status.appendChild(readout("log evidence", "posterior.log_evidence", snap.posterior.log_evidence));
  pane.appendChild(status);

  const marginals = el("div", "marginals");
  PARAM_NAMES.forEach((name, idx) => marginals.appendChild(marginalBlock(snap, name, idx)));
  pane.appendChild(marginals);
  pane.appendChild(seriesCharts(state.history));
  return pane;
}

function forecastBlock(
  fc: ForecastDict,
  root: "snapshot" | "whatif",
  observedInWindow: number | undefined,
  observedMags: number[],
): HTMLElement {
  // snapshot forecasts live under "forecast"; a what-if reply is its own doc
  const p = root === "snapshot" ? "forecast." : "";
  const block = el("div", `forecast-block forecast-${root}`);
  block.setAttribute("data-root", root);
  const title =
    root === "whatif" && fc.flags.shutin_at !== undefined
      ? el("h3", undefined, "what-if: shut in at ")
      : el("h3", undefined, root === "whatif" ? "what-if" : "scheduled injection");
  if (root === "whatif" && fc.flags.shutin_at !== undefined) {
    title.appendChild(num(`flags.shutin_at`, fc.flags.shutin_at));
    title.appendChild(document.createTextNode(" d"));
  }
  block.appendChild(title);

  const win = el("div", "window-readout");
  win.appendChild(readout("window start (d)", `${p}t_days`, fc.t_days));
  win.appendChild(readout("window length (d)", `${p}h_days`, fc.h_days));
  block.appendChild(win);

  const count = el("div", "count-forecast");
  count.appendChild(el("h4", undefined, "event count"));
  count.appendChild(
    pmfBarChart(fc.count.pmf, fc.count.credible_90, { observed: observedInWindow }),
  );
  count.appendChild(readout("mean", `${p}count.mean`, fc.count.mean));
  const band = el("div", "readout");
  band.appendChild(el("span", "label", "90% interval"));
  band.appendChild(num(`${p}count.credible_90.0`, fc.count.credible_90[0]));
  band.appendChild(el("span", "sep", ".."));
  band.appendChild(num(`${p}count.credible_90.1`, fc.count.credible_90[1]));
  count.appendChild(band);
  if (fc.count.tail_folded) {
    count.appendChild(el("div", "tail-note", "last bar includes folded tail mass"));
  }
  block.appendChild(count);

  const mm = el("div", "maxmag-forecast");
  mm.appendChild(el("h4", undefined, "maximum magnitude"));
  mm.appendChild(ccdfChart(fc.max_magnitude.mesh, fc.max_magnitude.ccdf, fc.max_magnitude.credible, observedMags));
  const cred = el("div", "readout");
  cred.appendChild(el("span", "label", "5% below"));
  cred.appendChild(num(`${p}max_magnitude.credible.0`, fc.max_magnitude.credible[0]));
  cred.appendChild(el("span", "label", "0.1% above"));
  cred.appendChild(num(`${p}max_magnitude.credible.1`, fc.max_magnitude.credible[1]));
  mm.appendChild(cred);
  block.appendChild(mm);
  return block;
}

export function renderForecastPane(state: ConsoleState): HTMLElement {
  const pane = el("section", "pane forecast-pane");
  pane.id = "forecast-pane";
  pane.setAttribute("data-root", "snapshot");
  const snap = state.latest;
  if (!snap) {
    pane.appendChild(el("p", "placeholder", "waiting for the first snapshot"));
    return pane;
  }
  const head = el("div", "pane-head");
  head.appendChild(el("h2", undefined, "forecast"));
  pane.appendChild(head);

  const fc = snap.forecast;
  const inWindow = state.submitted.filter(
    (e) => e.t >= fc.t_days && e.t < fc.t_days + fc.h_days,
  ).length;
  const mags = state.submitted.map((e) => e.m);

  const compare = el("div", state.whatif ? "forecast-compare side-by-side" : "forecast-compare");
  compare.appendChild(forecastBlock(fc, "snapshot", inWindow, mags));
  if (state.whatif) {
    compare.appendChild(forecastBlock(state.whatif.forecast, "whatif", undefined, mags));
  }
  pane.appendChild(compare);
  return pane;
}

export interface Handlers {
  onSubmitEvent(t: number, m: number): void;
  onDeclareShutin(t: number): void;
  onWhatif(t: number): void;
}

function controlForm(
  idPrefix: string,
  legend: string,
  fields: { name: string; label: string }[],
  submitLabel: string,
  onSubmit: (values: Record<string, number>) => void,
  error?: string,
): HTMLElement {
  const form = el("form", `control ${idPrefix}-form`);
  form.id = `${idPrefix}-form`;
  form.appendChild(el("strong", undefined, legend));
  for (const f of fields) {
    const lab = el("label", undefined, `${f.label} `);
    const input = el("input");
    input.name = f.name;
    input.id = `${idPrefix}-${f.name}`;
    input.setAttribute("inputmode", "decimal");
    lab.appendChild(input);
    form.appendChild(lab);
  }
  const btn = el("button", undefined, submitLabel);
  btn.type = "submit";
  form.appendChild(btn);
  const err = el("div", "error");
  err.id = `${idPrefix}-error`;
  if (error) err.textContent = error;
  form.appendChild(err);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const values: Record<string, number> = {};
    for (const f of fields) {
      const input = form.querySelector<HTMLInputElement>(`#${idPrefix}-${f.name}`);
      values[f.name] = Number(input?.value);
    }
    onSubmit(values);
  });
  return form;
}

export function renderControls(state: ConsoleState, handlers: Handlers): HTMLElement {
  const panel = el("section", "pane controls");
  panel.id = "controls";
  panel.appendChild(el("h2", undefined, "operator input"));
  panel.appendChild(
    controlForm(
      "event",
      "record event",
      [
        { name: "t", label: "t (d)" },
        { name: "m", label: "magnitude" },
      ],
      "submit",
      (v) => handlers.onSubmitEvent(v.t, v.m),
      state.errors.event,
    ),
  );
  panel.appendChild(
    controlForm(
      "shutin",
      "declare shut-in",
      [{ name: "t", label: "t (d)" }],
      "declare",
      (v) => handlers.onDeclareShutin(v.t),
      state.errors.shutin,
    ),
  );
  panel.appendChild(
    controlForm(
      "whatif",
      "what-if: stop injection at",
      [{ name: "t", label: "t (d)" }],
      "compare",
      (v) => handlers.onWhatif(v.t),
      state.errors.whatif,
    ),
  );
  return panel;
}

export function renderStatusBar(state: ConsoleState, now: number): HTMLElement {
  const bar = el("div", "status-bar");
  bar.id = "status-bar";
  const conn = el("span", `conn conn-${state.connection}`, state.connection);
  conn.id = "conn-status";
  bar.appendChild(conn);
  bar.appendChild(el("span", "session-id", `session ${state.sessionId}`));
  const stale = el("div", "stale-banner");
  stale.id = "stale-banner";
  if (isStale(state, now)) {
    stale.textContent = "stale: no snapshot from the server in over 10 s";
    stale.classList.add("visible");
  } else {
    stale.classList.add("hidden");
  }
  bar.appendChild(stale);
  return bar;
}

/** Render the whole console into (the children of) `container`. */
export function renderConsole(
  container: HTMLElement,
  state: ConsoleState,
  handlers: Handlers,
  now: number,
): void {
  container.replaceChildren(
    renderStatusBar(state, now),
    renderPosteriorPane(state),
    renderForecastPane(state),
    renderControls(state, handlers),
  );
}
