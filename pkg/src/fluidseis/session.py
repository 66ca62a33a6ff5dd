"""Online updating: a session absorbs events as they arrive, switches from the
partial to the complete likelihood the moment shut-in is declared, and serves
posterior snapshots and forecasts from one grid whose axes never move.

While injection runs, the working profile is the schedule continued past its
last breakpoint (we do not know if or when a shut-in will happen); declaring
shut-in rebuilds it with the actual stop time.  Forecasts always use the
session's current working profile, so pre-shut-in forecasts assume the
schedule is kept.

A session optionally appends every accepted operation to a JSON-lines log;
replaying the log reconstructs the session bit-for-bit after a crash.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass

import numpy as np

from .catalog import InjectionProfile, SeismicCatalog
from .forecast import (DEFAULT_H_DAYS, CountForecast, MaxMagForecast,
                       forecast_counts, forecast_max_magnitude, forecast_to_dict)
from .inference import (GridSpec, PosteriorSummary, build_axes, compute_posterior,
                        posterior_to_dict, summarize)
from .likelihood import LikelihoodContext
from .magnitudes import DEFAULT_M_UPPER
from .priors import prior_from_dict, prior_to_dict

__all__ = ["Snapshot", "OnlineSession", "MonotonicityError", "replay",
           "snapshots_to_jsonl"]


@dataclass(frozen=True, eq=False)
class Snapshot:
    t_now: float
    summary: PosteriorSummary
    count_forecast: CountForecast
    maxmag_forecast: MaxMagForecast
    likelihood_mode: str      # "partial" until shut-in is declared


class MonotonicityError(ValueError):
    """Event arrived out of time order, or shut-in declared twice."""


class OnlineSession:
    """Single-writer session state; every mutator holds the session lock.

    Readers get immutable values (grids, snapshots), so handing them out
    without copying is safe.
    """

    def __init__(self, prior, profile, m0, mu=DEFAULT_M_UPPER, grid_spec=None,
                 h_days=DEFAULT_H_DAYS, session_id=None, log_path=None,
                 _replaying=False):
        self.id = session_id or uuid.uuid4().hex
        self.prior = prior
        self.scheduled = profile.without_shutin()
        self.m0 = float(m0)
        self.mu = float(mu)
        self.h_days = float(h_days)
        self.grid_spec = grid_spec or GridSpec()
        self.axes = build_axes(prior, self.grid_spec)

        self._lock = threading.RLock()
        self._times = []
        self._mags = []
        self.shut_in_declared = None
        self.t_now = 0.0
        self.version = 0
        self._grid = None         # invalidated on every accepted mutation

        self._log_path = log_path
        self._log_fh = None
        if log_path is not None and not _replaying:
            self._log_fh = open(log_path, "a", encoding="utf-8")
            self._append_log({
                "op": "create", "id": self.id, "m0": self.m0, "mu": self.mu,
                "h_days": self.h_days,
                "prior": prior_to_dict(prior),
                "profile": {"t_days": profile.times.tolist(),
                            "rate_m3_per_day": profile.rates.tolist()},
                "grid": {"n_a": self.grid_spec.n_a, "n_b": self.grid_spec.n_b,
                         "n_tau": self.grid_spec.n_tau,
                         "tau_lo": self.grid_spec.tau_lo,
                         "tau_hi": self.grid_spec.tau_hi},
            })

    # -- state ---------------------------------------------------------------

    @property
    def mode(self):
        return "partial" if self.shut_in_declared is None else "complete"

    @property
    def profile(self):
        """Working profile: schedule continuation, or the declared stop."""
        if self.shut_in_declared is None:
            return self.scheduled
        return self.scheduled.with_shutin(self.shut_in_declared)

    def catalog(self):
        times = np.array(self._times, dtype=float)
        mags = np.array(self._mags, dtype=float)
        return SeismicCatalog(times=times, mags=mags, m0=self.m0,
                              t_end=max(self.t_now, 0.0), label=self.id)

    def context(self):
        return LikelihoodContext(catalog=self.catalog(), profile=self.profile,
                                 mu=self.mu, mode=self.mode)

    # -- mutators ------------------------------------------------------------

    def _append_log(self, record):
        if self._log_fh is not None:
            self._log_fh.write(json.dumps(record) + "\n")
            self._log_fh.flush()

    def submit_events(self, times, mags):
        """Accept a monotone batch; rejects the whole batch on any violation."""
        times = [float(t) for t in np.atleast_1d(times)]
        mags = [float(m) for m in np.atleast_1d(mags)]
        if len(times) != len(mags):
            raise ValueError("times and mags length mismatch")
        with self._lock:
            last = self._times[-1] if self._times else -np.inf
            for t, m in zip(times, mags):
                if t <= last:
                    raise MonotonicityError(
                        f"event at t={t} not after latest accepted t={last}")
                if not np.isfinite(t) or not np.isfinite(m):
                    raise ValueError("event fields must be finite")
                if m < self.m0:
                    raise ValueError(f"magnitude {m} below completeness {self.m0}")
                last = t
            self._times.extend(times)
            self._mags.extend(mags)
            self.t_now = max(self.t_now, times[-1]) if times else self.t_now
            self._grid = None
            self.version += 1
            self._append_log({"op": "events", "t": times, "m": mags})

    def submit_event(self, t, m):
        self.submit_events([t], [m])

    def declare_shutin(self, t):
        with self._lock:
            if self.shut_in_declared is not None:
                raise MonotonicityError("shut-in already declared")
            t = float(t)
            self.scheduled.with_shutin(t)   # validates t against the schedule
            self.shut_in_declared = t
            self.t_now = max(self.t_now, t)
            self._grid = None
            self.version += 1
            self._append_log({"op": "shutin", "t": t})

    def advance(self, t):
        """Move the clock forward without an event (exposure keeps growing)."""
        with self._lock:
            t = float(t)
            if t > self.t_now:
                self.t_now = t
                self._grid = None
                self.version += 1
                self._append_log({"op": "advance", "t": t})

    # -- views ---------------------------------------------------------------

    def posterior(self):
        with self._lock:
            if self._grid is None:
                self._grid = compute_posterior(self.context(), self.prior,
                                               axes=self.axes, t_now=self.t_now)
            return self._grid

    def snapshot(self, h_days=None, polish_map=False):
        """Current posterior summary plus forecasts for [t_now, t_now + h].

        ``polish_map`` refines the MAP off-grid; replay loops leave it off
        since the refinement costs far more than the update itself.
        """
        with self._lock:
            grid = self.posterior()
            ctx = self.context()
            h = self.h_days if h_days is None else float(h_days)
            if polish_map:
                summary = summarize(grid, ctx, self.prior, t_now=self.t_now)
            else:
                summary = summarize(grid)
            return Snapshot(
                t_now=self.t_now,
                summary=summary,
                count_forecast=forecast_counts(grid, ctx, self.t_now, h),
                maxmag_forecast=forecast_max_magnitude(grid, ctx, self.t_now, h),
                likelihood_mode=self.mode)

    def whatif_forecast(self, shutin_at, h_days=None):
        """Forecast for [shutin_at, shutin_at+h] under a hypothetical stop."""
        with self._lock:
            shutin_at = float(shutin_at)
            if self.shut_in_declared is not None:
                raise MonotonicityError("shut-in already declared; nothing to explore")
            if shutin_at < self.t_now:
                raise ValueError("hypothetical shut-in lies in the past")
            grid = self.posterior()
            profile = self.scheduled.with_shutin(shutin_at)
            ctx = LikelihoodContext(catalog=self.catalog(), profile=profile,
                                    mu=self.mu, mode="partial")
            h = self.h_days if h_days is None else float(h_days)
            return (forecast_counts(grid, ctx, shutin_at, h),
                    forecast_max_magnitude(grid, ctx, shutin_at, h))

    def snapshot_dict(self, h_days=None):
        snap = self.snapshot(h_days)
        post = posterior_to_dict(self.posterior(), snap.summary, self.m0)
        return {
            "session": self.id,
            "t_now": snap.t_now,
            "likelihood_mode": snap.likelihood_mode,
            "n_events": len(self._times),
            "shut_in": self.shut_in_declared,
            "posterior": post,
            "forecast": forecast_to_dict(
                snap.count_forecast, snap.maxmag_forecast,
                flags={"likelihood_mode": snap.likelihood_mode, "whatif": False}),
        }

    def close(self):
        if self._log_fh is not None:
            self._log_fh.close()
            self._log_fh = None

    # -- persistence ---------------------------------------------------------

    @classmethod
    def recover(cls, log_path):
        """Rebuild a session from its operation log."""
        with open(log_path, "r", encoding="utf-8") as fh:
            lines = [json.loads(line) for line in fh if line.strip()]
        if not lines or lines[0].get("op") != "create":
            raise ValueError("log does not start with a create record")
        head = lines[0]
        profile = InjectionProfile(
            times=np.asarray(head["profile"]["t_days"], dtype=float),
            rates=np.asarray(head["profile"]["rate_m3_per_day"], dtype=float))
        grid = head.get("grid") or {}
        spec = GridSpec(n_a=grid.get("n_a", 64), n_b=grid.get("n_b", 64),
                        n_tau=grid.get("n_tau", 64), tau_lo=grid.get("tau_lo"),
                        tau_hi=grid.get("tau_hi"))
        sess = cls(prior=prior_from_dict(head["prior"]), profile=profile,
                   m0=head["m0"], mu=head["mu"], grid_spec=spec,
                   h_days=head.get("h_days", DEFAULT_H_DAYS),
                   session_id=head["id"], log_path=log_path, _replaying=True)
        for rec in lines[1:]:
            if rec["op"] == "events":
                sess.submit_events(rec["t"], rec["m"])
            elif rec["op"] == "shutin":
                sess.declare_shutin(rec["t"])
            elif rec["op"] == "advance":
                sess.advance(rec["t"])
        sess._log_path = log_path
        sess._log_fh = open(log_path, "a", encoding="utf-8")
        return sess


def replay(catalog, profile, prior, cadence=0.1, mu=DEFAULT_M_UPPER,
           grid_spec=None, h_days=DEFAULT_H_DAYS, log_path=None):
    """Walk a recorded catalog forward in time, as if its events streamed in.

    The posterior is refreshed after every event and at every cadence tick;
    the profile's shut-in (if any) is declared the moment the clock reaches
    it.  Returns the ordered snapshot list and the finished session, whose
    final grid must match a batch computation on the full catalog.
    """
    if not cadence > 0.0:
        raise ValueError("cadence must be > 0")
    session = OnlineSession(prior=prior, profile=profile, m0=catalog.m0, mu=mu,
                            grid_spec=grid_spec, h_days=h_days, log_path=log_path)
    ticks = np.arange(0.0, catalog.t_end + 0.5 * cadence, cadence)
    marks = set(np.round(ticks, 12).tolist()) | set(catalog.times.tolist())
    marks.add(float(catalog.t_end))
    if profile.shut_in is not None:
        marks.add(float(profile.shut_in))

    snapshots = []
    done = 0
    for t in sorted(marks):
        if profile.shut_in is not None and t >= profile.shut_in \
                and session.shut_in_declared is None:
            session.declare_shutin(profile.shut_in)
        while done < catalog.n_events and catalog.times[done] <= t:
            session.submit_event(catalog.times[done], catalog.mags[done])
            done += 1
        session.advance(t)
        snapshots.append(session.snapshot())
    session.close()
    return snapshots, session


def snapshots_to_jsonl(snapshots, grid_axes=None):
    """Compact JSON-lines rendering of a replay (no full posterior export)."""
    lines = []
    for s in snapshots:
        lines.append(json.dumps({
            "t_now": s.t_now,
            "likelihood_mode": s.likelihood_mode,
            "mean": {"a_fb": s.summary.mean.a_fb, "b": s.summary.mean.b,
                     "tau": s.summary.mean.tau},
            "sd": list(s.summary.sd),
            "corr_a_b": float(s.summary.corr[0, 1]),
            "corr_b_tau": float(s.summary.corr[1, 2]),
            "count_mean": s.count_forecast.mean,
            "count_credible_90": list(s.count_forecast.credible_90),
            "maxmag_credible": list(s.maxmag_forecast.credible),
        }))
    return "\n".join(lines) + "\n"
