"""Fluid-induced seismicity rate model.

The event rate above completeness ``m0`` is proportional to the injection
flow rate while injecting and decays exponentially after shut-in::

    lam(t) = 10**(a_fb - b*m0) * Vdot(t)                          t <= t_s
    lam(t) = 10**(a_fb - b*m0) * Vdot(t_s-) * exp(-(t - t_s)/tau) t >  t_s

``Vdot(t_s-)`` is the left limit of the flow rate at shut-in, which keeps the
rate continuous across the stop.  The cumulative rate ``Lam`` has an exact
closed form (linear in the injected volume during injection, an exponential
tail after), so simulation by inversion and likelihood evaluation never need
numerical quadrature.

``rate_shape``/``cumulative_shape`` evaluate the profile-and-tau dependent
factor alone, broadcasting over arrays of ``tau``; inference code scales them
by ``10**(a_fb - b*m0)`` across whole parameter grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RateParams",
    "ProcessExtinctionError",
    "rate_at",
    "cumulative_rate",
    "inverse_cumulative",
    "total_mass",
    "rate_shape",
    "cumulative_shape",
    "log_productivity",
]

LN10 = np.log(10.0)


class ProcessExtinctionError(ValueError):
    """Requested cumulative mass beyond what the process can ever reach."""


@dataclass(frozen=True)
class RateParams:
    """Rate-model parameter triple.

    a_fb : activation feedback, log10 events per unit injected volume
           (net of the completeness correction b*m0)
    b    : earthquake size ratio (Gutenberg-Richter slope), > 0
    tau  : mean relaxation time of the post-shut-in decay, days, > 0
    """

    a_fb: float
    b: float
    tau: float

    def __post_init__(self):
        if not (np.isfinite(self.a_fb) and np.isfinite(self.b) and np.isfinite(self.tau)):
            raise ValueError("rate parameters must be finite")
        if self.b <= 0.0:
            raise ValueError("b must be > 0")
        if self.tau <= 0.0:
            raise ValueError("tau must be > 0")

    def as_array(self):
        return np.array([self.a_fb, self.b, self.tau], dtype=float)


def log_productivity(a_fb, b, m0):
    """The exponent a_fb - b*m0 (broadcasts)."""
    return np.asarray(a_fb) - np.asarray(b) * m0


def rate_shape(t, tau, profile):
    """Rate with the 10**(a_fb - b*m0) factor stripped: Vdot during injection,
    exponentially decaying Vdot(t_s-) afterwards.  Broadcasts over t and tau."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if profile.shut_in is None:
        out = np.broadcast_to(profile.rate(t), np.broadcast_shapes(t.shape, tau.shape))
        return out if out.ndim else float(out)
    ts = profile.shut_in
    amp = profile.rate_before_shutin
    inj = profile.rate(np.minimum(t, ts))
    with np.errstate(over="ignore"):
        decay = amp * np.exp(-(np.maximum(t - ts, 0.0)) / tau)
    out = np.where(t < ts, inj, decay)
    return out if out.ndim else float(out)


def cumulative_shape(t, tau, profile):
    """Integral of ``rate_shape`` from 0 to t.  Broadcasts over t and tau."""
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if profile.shut_in is None:
        out = np.broadcast_to(profile.cumulative_volume(t),
                              np.broadcast_shapes(t.shape, tau.shape))
        return out if out.ndim else float(out)
    ts = profile.shut_in
    amp = profile.rate_before_shutin
    v_inj = profile.cumulative_volume(np.minimum(t, ts))
    tail = amp * tau * -np.expm1(-(np.maximum(t - ts, 0.0)) / tau)
    out = np.where(t <= ts, v_inj, v_inj + tail)
    return out if out.ndim else float(out)


def rate_at(t, theta, profile, m0):
    """Event rate lam(t | theta) in events/day.  Vectorized over t."""
    scale = 10.0 ** log_productivity(theta.a_fb, theta.b, m0)
    return scale * rate_shape(t, theta.tau, profile)


def cumulative_rate(t, theta, profile, m0):
    """Expected event count Lam(t | theta) on [0, t].  Vectorized over t."""
    scale = 10.0 ** log_productivity(theta.a_fb, theta.b, m0)
    return scale * cumulative_shape(t, theta.tau, profile)


def total_mass(theta, profile, m0):
    """Lam(inf | theta); infinite when the schedule never reaches zero rate."""
    scale = 10.0 ** log_productivity(theta.a_fb, theta.b, m0)
    if profile.shut_in is not None:
        v_total = profile.cumulative_volume(profile.shut_in)
        return scale * (v_total + profile.rate_before_shutin * theta.tau)
    if profile.rates[-1] > 0.0:
        return np.inf
    return scale * profile.cumulative_volume(profile.times[-1])


def inverse_cumulative(target, theta, profile, m0):
    """Earliest t with ``cumulative_rate(t) == target`` (exact piecewise inversion).

    Linear inversion inside injection segments, logarithmic inversion on the
    post-shut-in tail.  Vectorized over ``target``; raises
    ``ProcessExtinctionError`` when a target is at or beyond the total mass.
    """
    target = np.asarray(target, dtype=float)
    scalar = target.ndim == 0
    v = np.atleast_1d(target / 10.0 ** log_productivity(theta.a_fb, theta.b, m0))
    if np.any(target < 0.0):
        raise ValueError("target must be >= 0")

    times, rates, cumvol = profile.times, profile.rates, profile._cumvol
    out = np.empty_like(v)

    if profile.shut_in is not None:
        ts = profile.shut_in
        amp = profile.rate_before_shutin
        v_ts = profile.cumulative_volume(ts)
        v_end = v_ts + amp * theta.tau
        tail = v > v_ts
        if np.any(v[tail] >= v_end):
            raise ProcessExtinctionError("target at or beyond total tail mass")
        out[tail] = ts - theta.tau * np.log1p(-(v[tail] - v_ts) / (amp * theta.tau))
        head = ~tail
    else:
        if rates[-1] > 0.0:
            head = np.ones_like(v, dtype=bool)
        else:
            v_end = cumvol[-1]
            if np.any(v >= v_end):
                raise ProcessExtinctionError("target at or beyond total tail mass")
            head = np.ones_like(v, dtype=bool)

    if np.any(head):
        vh = v[head]
        # side="left" so a target sitting exactly on a zero-rate plateau
        # resolves to the earliest preimage, not the plateau end
        idx = np.clip(np.searchsorted(cumvol, vh, side="left") - 1, 0, rates.size - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            dt = (vh - cumvol[idx]) / rates[idx]
        out[head] = np.where(rates[idx] > 0.0, times[idx] + dt, times[idx])

    return float(out[0]) if scalar else out
