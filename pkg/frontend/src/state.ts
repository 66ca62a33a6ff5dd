import type { ForecastDict, Snapshot, SubmittedEvent } from "./types.js";

// All pane content is a pure function of this state, and the state is built
// only from what the server sent (plus the operator's own raw inputs), so
// reconnecting and replaying the same stream reproduces identical panes.

export type ConnectionStatus = "connecting" | "live" | "closed" | "error";

export interface WhatifView {
  shutinAt: number;
  forecast: ForecastDict;
}

export interface ConsoleState {
  sessionId: string;
  connection: ConnectionStatus;
  latest: Snapshot | null;
  /** snapshots in arrival order, for the time-series panes */
  history: Snapshot[];
  whatif: WhatifView | null;
  /** events this operator entered; echoed as ticks on the forecast pane */
  submitted: SubmittedEvent[];
  /** wall-clock ms of the last stream message */
  lastMessageAt: number | null;
  /** inline error messages, keyed by the control that caused them */
  errors: { event?: string; shutin?: string; whatif?: string };
}

export function initialState(sessionId: string): ConsoleState {
  return {
    sessionId,
    connection: "connecting",
    latest: null,
    history: [],
    whatif: null,
    submitted: [],
    lastMessageAt: null,
    errors: {},
  };
}

/** Apply one streamed snapshot, in arrival order. */
export function applySnapshot(state: ConsoleState, snap: Snapshot, now: number): ConsoleState {
  return {
    ...state,
    connection: "live",
    latest: snap,
    history: [...state.history, snap],
    lastMessageAt: now,
  };
}

export const STALE_AFTER_MS = 10_000;

export function isStale(state: ConsoleState, now: number): boolean {
  if (state.lastMessageAt === null) return false;
  return now - state.lastMessageAt > STALE_AFTER_MS;
}
