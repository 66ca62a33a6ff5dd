"""Complete and partial log-likelihoods of the injection-driven NHPP.

Natural logarithms throughout.  Base-10 factors such as 10**(a_fb - b*m0)
enter only through the single identity 10**x = exp(x * LN10).

Both likelihood forms factor through a handful of scalar reductions of the
event history (EventStats), which makes evaluation over a tensor grid of
parameter nodes cost O(grid size) after one pass over the events.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import InjectionProfile, SeismicCatalog
from .magnitudes import DEFAULT_M_UPPER, _norm
from .rate import LN10, RateParams, cumulative_shape

__all__ = [
    "LikelihoodContext",
    "EventStats",
    "suff_stats",
    "log_likelihood_complete",
    "log_likelihood_partial",
    "log_likelihood_grid",
]


@dataclass(frozen=True)
class LikelihoodContext:
    """Catalog, injection schedule and magnitude bounds bundled for evaluation.

    ``complete`` mode scores the whole observation window including the
    post-shut-in decay, so it needs a declared shut-in inside the window.
    ``partial`` mode scores a growing record while fluid is still moving and
    is exactly independent of tau.
    """

    catalog: SeismicCatalog
    profile: InjectionProfile
    mu: float = DEFAULT_M_UPPER
    mode: str = "complete"

    def __post_init__(self):
        if self.mode not in ("complete", "partial"):
            raise ValueError("mode must be 'complete' or 'partial'")
        if not self.mu > self.catalog.m0:
            raise ValueError("need mu > m0")
        ts = self.profile.shut_in
        if self.mode == "complete":
            if ts is None:
                raise ValueError("complete mode needs a shut-in time")
            if self.catalog.t_end < ts:
                raise ValueError("observation window ends before shut-in")


@dataclass(frozen=True)
class EventStats:
    """Scalar reductions the likelihood factors through."""

    n: int
    n_flow: int             # events strictly before shut-in
    sum_log_rate: float     # sum of ln V'(t_n) over flow events
    log_rate_shutin: float  # ln V'(ts-); 0.0 when there is no decay branch
    sum_dt_post: float      # sum of (t_n - ts) over events at or after shut-in
    sum_dm: float           # sum of (m_n - m0)
    window_end: float
    impossible: bool        # an event fell where the modeled rate vanishes


def suff_stats(catalog, profile, mode="complete", t_now=None):
    """Reduce the event history to EventStats.

    Events at exactly the shut-in instant take the rate's left limit, which
    keeps the intensity continuous there.  ``t_now`` truncates the record;
    it defaults to the catalog's window end.
    """
    t_end = float(catalog.t_end if t_now is None else t_now)
    times, mags = catalog.times, catalog.mags
    if t_now is not None:
        keep = times <= t_end
        times, mags = times[keep], mags[keep]

    ts = profile.shut_in if mode == "complete" else None
    flow = times < ts if ts is not None else np.ones(times.size, dtype=bool)
    flow_rates = profile.rate(times[flow])

    impossible = bool(np.any(flow_rates <= 0.0))
    sum_log_rate = float(np.sum(np.log(flow_rates))) if not impossible else -np.inf

    n_post = int(times.size - np.count_nonzero(flow))
    if ts is not None and n_post:
        log_rate_shutin = float(np.log(profile.rate_before_shutin))
        sum_dt_post = float(np.sum(times[~flow] - ts))
    else:
        log_rate_shutin = 0.0
        sum_dt_post = 0.0

    return EventStats(
        n=int(times.size),
        n_flow=int(np.count_nonzero(flow)),
        sum_log_rate=sum_log_rate,
        log_rate_shutin=log_rate_shutin,
        sum_dt_post=sum_dt_post,
        sum_dm=float(np.sum(mags - catalog.m0)),
        window_end=t_end,
        impossible=impossible,
    )


def _mag_terms(b, n, sum_dm, m0, mu):
    # n*ln(b ln10) - b ln10 * sum(m_n - m0) - n*ln(norm), vectorized over b
    b = np.asarray(b, dtype=float)
    return n * np.log(b * LN10) - b * LN10 * sum_dm - n * np.log(_norm(b, m0, mu))


def log_likelihood_grid(ctx, a_nodes, b_nodes, tau_nodes, t_now=None):
    """Log-likelihood over the tensor grid, shape (len(a), len(b), len(tau)).

    In partial mode the result is constant along the tau axis.
    """
    a = np.asarray(a_nodes, dtype=float)
    b = np.asarray(b_nodes, dtype=float)
    tau = np.asarray(tau_nodes, dtype=float)

    stats = suff_stats(ctx.catalog, ctx.profile, mode=ctx.mode, t_now=t_now)
    if stats.impossible:
        return np.full((a.size, b.size, tau.size), -np.inf)

    m0 = ctx.catalog.m0
    u = a[:, None] - m0 * b[None, :]
    s = 10.0**u

    event = stats.n * LN10 * u + _mag_terms(b, stats.n, stats.sum_dm, m0, ctx.mu)
    event = event + stats.sum_log_rate + (stats.n - stats.n_flow) * stats.log_rate_shutin

    if ctx.mode == "complete":
        gshape = cumulative_shape(stats.window_end, tau, ctx.profile)
        tau_term = -stats.sum_dt_post / tau
    else:
        gshape = np.full(tau.size, ctx.profile.cumulative_volume(stats.window_end))
        tau_term = np.zeros(tau.size)

    return event[:, :, None] + tau_term[None, None, :] - s[:, :, None] * gshape[None, None, :]


def log_likelihood_complete(theta, ctx):
    """Complete log-likelihood over [0, t_end]; -inf if any event is impossible."""
    if ctx.mode != "complete":
        raise ValueError("context is not in complete mode")
    out = log_likelihood_grid(ctx, [theta.a_fb], [theta.b], [theta.tau])
    return float(out[0, 0, 0])


def log_likelihood_partial(theta, t_now, ctx):
    """Partial log-likelihood of the record up to ``t_now``; no tau dependence."""
    if ctx.mode != "partial":
        raise ValueError("context is not in partial mode")
    t_now = float(t_now)
    if ctx.catalog.n_events and t_now < ctx.catalog.times[-1]:
        raise ValueError("t_now must cover every event in the context")
    ts = ctx.profile.shut_in
    if ts is not None and t_now > ts:
        raise ValueError("partial mode does not extend past shut-in")
    out = log_likelihood_grid(ctx, [theta.a_fb], [theta.b], [theta.tau], t_now=t_now)
    return float(out[0, 0, 0])
