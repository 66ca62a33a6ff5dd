// Wire types for the session service. Field names and nesting mirror the
// server JSON one-to-one; the console never derives numbers of its own.

export type LikelihoodMode = "partial" | "complete";

export type ParamName = "a_fb" | "b" | "tau";

export const PARAM_NAMES: ParamName[] = ["a_fb", "b", "tau"];

export interface ParamTriple {
  a_fb: number;
  b: number;
  tau: number;
}

export interface PosteriorDict {
  axes: Record<ParamName, number[]>;
  marginals: Record<ParamName, number[]>;
  mean: ParamTriple;
  map: ParamTriple;
  mle: ParamTriple | null;
  /** 3x3, ordered (a_fb, b, tau). */
  corr: number[][];
  /** same ordering as corr */
  sd: number[];
  log_evidence: number;
  m0: number;
  tau_mixture: { tau: number[]; coefficients: number[] };
}

export interface CountForecastDict {
  pmf: number[];
  credible_90: [number, number];
  mean: number;
  /** true when the last pmf bin absorbed non-negligible tail mass */
  tail_folded: boolean;
}

export interface MaxMagForecastDict {
  mesh: number[];
  ccdf: number[];
  /** [5% lower endpoint, 0.1% exceedance upper endpoint] */
  credible: [number, number];
}

export interface ForecastDict {
  t_days: number;
  h_days: number;
  count: CountForecastDict;
  max_magnitude: MaxMagForecastDict;
  flags: { likelihood_mode?: LikelihoodMode; whatif?: boolean; shutin_at?: number };
}

export interface Snapshot {
  session: string;
  t_now: number;
  likelihood_mode: LikelihoodMode;
  n_events: number;
  shut_in: number | null;
  posterior: PosteriorDict;
  forecast: ForecastDict;
}

/** Event as the operator enters it; echoed on the forecast pane. */
export interface SubmittedEvent {
  t: number;
  m: number;
}
