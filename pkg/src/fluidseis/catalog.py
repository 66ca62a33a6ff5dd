"""Event catalogs and injection schedules.

A catalog is an ordered set of (time, magnitude) pairs above a completeness
magnitude ``m0``, observed on a window ``[0, t_end]`` with times measured in
days since injection start.  An injection schedule is a right-continuous step
function of flow rate in m3/day, optionally terminated by a shut-in.

Units: times are days, flow rates m3/day, cumulative volumes m3.  The
activation-feedback parameter of the rate model absorbs the flow-rate unit
choice, so fitted values are only comparable between runs that use the same
units.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CatalogFormatError",
    "SeismicEvent",
    "SeismicCatalog",
    "InjectionProfile",
    "parse_catalog",
    "parse_injection",
    "catalog_to_csv",
    "injection_to_csv",
    "load_catalog",
    "load_injection",
    "cumulative_volume",
]

EVENTS_HEADER = ["t_days", "magnitude"]
INJECTION_HEADER = ["t_days", "rate_m3_per_day", "shutin"]


class CatalogFormatError(ValueError):
    """Malformed catalog or injection file.  ``line`` is the 1-based file line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class SeismicEvent:
    """One event: occurrence time in days since injection start, moment magnitude."""

    t: float
    m: float


def _readonly(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SeismicCatalog:
    """Ordered event catalog above completeness ``m0`` on ``[0, t_end]``.

    ``times`` and ``mags`` are read-only float arrays; times are strictly
    increasing, all magnitudes are >= ``m0`` and all times <= ``t_end``.
    Instances are immutable and safe to share between threads.
    """

    times: np.ndarray
    mags: np.ndarray
    m0: float
    t_end: float
    label: str = ""

    def __post_init__(self):
        times = _readonly(self.times)
        mags = _readonly(self.mags)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "mags", mags)
        if times.ndim != 1 or mags.ndim != 1 or times.size != mags.size:
            raise ValueError("times and mags must be 1-d arrays of equal length")
        if not (np.isfinite(times).all() and np.isfinite(mags).all()):
            raise ValueError("non-finite event time or magnitude")
        if not np.isfinite(self.m0) or not np.isfinite(self.t_end):
            raise ValueError("m0 and t_end must be finite")
        if times.size:
            if times[0] < 0.0:
                raise ValueError("event times must be >= 0")
            if np.any(np.diff(times) <= 0.0):
                raise ValueError("event times must be strictly increasing")
            if times[-1] > self.t_end:
                raise ValueError("event time beyond t_end")
            if mags.min() < self.m0:
                raise ValueError("magnitude below completeness m0")

    @classmethod
    def from_events(cls, events, m0, t_end=None, label=""):
        events = sorted(events, key=lambda e: e.t)
        times = np.array([e.t for e in events], dtype=float)
        mags = np.array([e.m for e in events], dtype=float)
        if t_end is None:
            t_end = float(times[-1]) if times.size else 0.0
        return cls(times, mags, float(m0), float(t_end), label)

    @property
    def n_events(self):
        return int(self.times.size)

    @property
    def events(self):
        return tuple(SeismicEvent(float(t), float(m)) for t, m in zip(self.times, self.mags))

    def truncated(self, t_now):
        """Events with t <= t_now, window ending at t_now (for online replay)."""
        keep = self.times <= t_now
        return SeismicCatalog(self.times[keep], self.mags[keep], self.m0,
                              float(t_now), self.label)


@dataclass(frozen=True, eq=False)
class InjectionProfile:
    """Right-continuous step function of injection flow rate.

    ``times``/``rates`` are the step breakpoints; the first breakpoint must be
    at t = 0 and the last segment extends indefinitely.  When ``shut_in`` is
    set the profile is zero after it and strictly positive just before it;
    the shut-in instant itself must coincide with a zero-rate breakpoint.
    """

    times: np.ndarray
    rates: np.ndarray
    shut_in: float | None = None
    # cumulative volume at each breakpoint, precomputed for fast integration
    _cumvol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        times = _readonly(self.times)
        rates = _readonly(self.rates)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "rates", rates)
        if times.ndim != 1 or times.size == 0 or times.size != rates.size:
            raise ValueError("times and rates must be non-empty 1-d arrays of equal length")
        if not (np.isfinite(times).all() and np.isfinite(rates).all()):
            raise ValueError("non-finite breakpoint")
        if times[0] != 0.0:
            raise ValueError("first breakpoint must be at t = 0")
        if times.size > 1 and np.any(np.diff(times) <= 0.0):
            raise ValueError("breakpoint times must be strictly increasing")
        if rates.min() < 0.0:
            raise ValueError("flow rates must be >= 0")
        if self.shut_in is not None:
            ts = float(self.shut_in)
            if ts <= 0.0:
                raise ValueError("shut-in must be > 0")
            after = times > ts
            if np.any(rates[after] != 0.0):
                raise ValueError("nonzero flow rate after shut-in")
            i = np.searchsorted(times, ts, side="right") - 1
            if times[i] != ts or rates[i] != 0.0:
                raise ValueError("shut-in must coincide with a zero-rate breakpoint")
            if i == 0 or rates[i - 1] <= 0.0:
                raise ValueError("flow rate must be positive just before shut-in")
        seg = np.diff(times) * rates[:-1]
        cumvol = np.concatenate(([0.0], np.cumsum(seg)))
        cumvol.flags.writeable = False
        object.__setattr__(self, "_cumvol", cumvol)

    @classmethod
    def constant(cls, rate, shut_in=None):
        """A single-rate schedule, optionally stopped at ``shut_in``."""
        if shut_in is None:
            return cls(np.array([0.0]), np.array([float(rate)]))
        return cls(np.array([0.0, float(shut_in)]), np.array([float(rate), 0.0]),
                   shut_in=float(shut_in))

    @classmethod
    def from_breakpoints(cls, breakpoints, shut_in=None):
        bp = sorted(breakpoints)
        times = np.array([t for t, _ in bp], dtype=float)
        rates = np.array([r for _, r in bp], dtype=float)
        return cls(times, rates, shut_in=shut_in)

    def rate(self, t):
        """Flow rate at time(s) t (right-continuous step value)."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right") - 1
        out = np.where(idx >= 0, self.rates[np.clip(idx, 0, None)], 0.0)
        return out if out.ndim else float(out)

    @property
    def rate_before_shutin(self):
        """Left limit of the flow rate at the shut-in time."""
        if self.shut_in is None:
            raise ValueError("profile has no shut-in")
        i = np.searchsorted(self.times, self.shut_in, side="left")
        return float(self.rates[i - 1])

    def cumulative_volume(self, t):
        """Volume injected on [0, t]: exact integral of the step function."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, None)
        out = self._cumvol[idx] + self.rates[idx] * (t - self.times[idx])
        out = np.where(t <= 0.0, 0.0, out)
        return out if out.ndim else float(out)

    def with_shutin(self, ts):
        """Hypothetical stop at ``ts``: truncate the schedule and append the stop."""
        ts = float(ts)
        keep = self.times < ts
        times = np.append(self.times[keep], ts)
        rates = np.append(self.rates[keep], 0.0)
        return InjectionProfile(times, rates, shut_in=ts)

    def without_shutin(self):
        """Scheduled continuation: drop the stop and extend the last positive rate."""
        if self.shut_in is None:
            return self
        keep = self.times < self.shut_in
        return InjectionProfile(self.times[keep], self.rates[keep])


def cumulative_volume(profile, t):
    """Volume injected on [0, t] under ``profile`` (m3)."""
    return profile.cumulative_volume(t)


def _open_text(text):
    if hasattr(text, "read"):
        return text
    return io.StringIO(text)


def _parse_float(value, line, what):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise CatalogFormatError(f"{what} is not a number: {value!r}", line) from None
    if not np.isfinite(x):
        raise CatalogFormatError(f"{what} is not finite: {value!r}", line)
    return x


def parse_catalog(text, m0, t_end=None, label="", dedup=False):
    """Parse the events CSV (header ``t_days,magnitude``) into a catalog.

    Rows below the completeness magnitude ``m0`` are dropped and the rest are
    sorted in time.  Duplicate timestamps raise unless ``dedup`` is set, in
    which case later duplicates are silently dropped (timestamps are never
    jittered).  ``t_end`` defaults to the last event time.
    """
    reader = csv.reader(_open_text(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != EVENTS_HEADER:
        raise CatalogFormatError(f"expected header {','.join(EVENTS_HEADER)}", 1)
    times, mags = [], []
    for line, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise CatalogFormatError(f"expected 2 fields, got {len(row)}", line)
        t = _parse_float(row[0], line, "time")
        m = _parse_float(row[1], line, "magnitude")
        if t < 0.0:
            raise CatalogFormatError("event time must be >= 0", line)
        times.append(t)
        mags.append(m)
    times = np.asarray(times, dtype=float)
    mags = np.asarray(mags, dtype=float)
    keep = mags >= m0
    times, mags = times[keep], mags[keep]
    order = np.argsort(times, kind="stable")
    times, mags = times[order], mags[order]
    if times.size > 1:
        dup = np.diff(times) == 0.0
        if dup.any():
            if not dedup:
                raise CatalogFormatError(
                    f"duplicate event timestamps (t = {times[1:][dup][0]!r})")
            keep = np.concatenate(([True], ~dup))
            times, mags = times[keep], mags[keep]
    if t_end is None:
        t_end = float(times[-1]) if times.size else 0.0
    return SeismicCatalog(times, mags, float(m0), float(t_end), label)


def parse_injection(text):
    """Parse the injection CSV (header ``t_days,rate_m3_per_day,shutin``).

    At most one row may carry ``shutin = 1``; that row must have zero rate and
    marks the permanent stop.
    """
    reader = csv.reader(_open_text(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != INJECTION_HEADER:
        raise CatalogFormatError(f"expected header {','.join(INJECTION_HEADER)}", 1)
    times, rates = [], []
    shut_in = None
    for line, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise CatalogFormatError(f"expected 3 fields, got {len(row)}", line)
        t = _parse_float(row[0], line, "time")
        r = _parse_float(row[1], line, "flow rate")
        flag = row[2].strip()
        if flag not in ("0", "1"):
            raise CatalogFormatError(f"shutin flag must be 0 or 1, got {flag!r}", line)
        if r < 0.0:
            raise CatalogFormatError("flow rate must be >= 0", line)
        if times and t <= times[-1]:
            raise CatalogFormatError("breakpoint times must be strictly increasing", line)
        if flag == "1":
            if shut_in is not None:
                raise CatalogFormatError("second shutin flag", line)
            if r != 0.0:
                raise CatalogFormatError("shut-in row must have zero rate", line)
            shut_in = t
        times.append(t)
        rates.append(r)
    if not times:
        raise CatalogFormatError("injection file has no breakpoints")
    try:
        return InjectionProfile(np.asarray(times), np.asarray(rates), shut_in=shut_in)
    except ValueError as exc:
        raise CatalogFormatError(str(exc)) from exc


def catalog_to_csv(catalog):
    """Serialize a catalog to the events CSV format (round-trips exactly)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(EVENTS_HEADER)
    for t, m in zip(catalog.times, catalog.mags):
        writer.writerow([repr(float(t)), repr(float(m))])
    return out.getvalue()


def injection_to_csv(profile):
    """Serialize an injection profile to the injection CSV format."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(INJECTION_HEADER)
    for t, r in zip(profile.times, profile.rates):
        flag = 1 if profile.shut_in is not None and t == profile.shut_in else 0
        writer.writerow([repr(float(t)), repr(float(r)), flag])
    return out.getvalue()


def load_catalog(path, m0, t_end=None, label=None, dedup=False):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_catalog(fh, m0, t_end=t_end,
                             label=str(path) if label is None else label,
                             dedup=dedup)


def load_injection(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_injection(fh)
