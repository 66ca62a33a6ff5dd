"""Short-window predictive distributions for event counts and maximum magnitude.

The full-Bayes count forecast is a Poisson mixture across posterior grid
nodes: Poisson conditional on theta first, then averaging over theta.  The
ergodic shortcut (one Poisson at the posterior-average rate) is provided for
comparison only; it understates dispersion whenever the posterior carries
any width.

The maximum-magnitude exceedance uses the geometric collapse

    sum_n P(M <= m | b)**n Poisson(n; L) = exp(-L * P(M > m | b))

so no infinite sum is ever truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .inference import delta_posterior
from .magnitudes import gr_ccdf
from .rate import cumulative_shape

__all__ = [
    "DEFAULT_H_DAYS",
    "CountForecast",
    "MaxMagForecast",
    "default_mag_mesh",
    "forecast_counts",
    "forecast_counts_plugin",
    "forecast_counts_ergodic",
    "forecast_max_magnitude",
    "forecast_to_dict",
]

DEFAULT_H_DAYS = 4.0 / 24.0      # 4-hour operational window
PMF_TAIL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CountForecast:
    t: float
    h: float
    pmf: np.ndarray
    credible_90: tuple       # smallest equal-tail count interval with >= 0.9 mass
    mean: float
    tail_folded: bool        # last pmf bin absorbed more than the tail tolerance


@dataclass(frozen=True, eq=False)
class MaxMagForecast:
    t: float
    h: float
    mesh: np.ndarray
    ccdf: np.ndarray         # P(M_max > m | record), nonincreasing
    credible: tuple          # (5% left-tail bound, 0.1% right-tail bound)


def _node_window_masses(grid, ctx, t, h):
    """Per-node expected counts on [t, t+h] plus matching weights."""
    m0 = ctx.catalog.m0
    s = 10.0 ** (grid.a_nodes[:, None] - m0 * grid.b_nodes[None, :])
    dg = (cumulative_shape(t + h, grid.tau_nodes, ctx.profile)
          - cumulative_shape(t, grid.tau_nodes, ctx.profile))
    lam = s[:, :, None] * np.clip(dg, 0.0, None)[None, None, :]
    return lam, grid.weights


def _mixture_pmf(lam, w):
    """Poisson-mixture pmf in the log domain, stopped once the remaining
    tail is below PMF_TAIL_TOL and folded into the last bin."""
    lam = np.asarray(lam, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    lam_max = float(lam.max(initial=0.0))
    n_cap = int(lam_max + 12.0 * np.sqrt(lam_max) + 50.0)

    with np.errstate(divide="ignore"):
        log_lam = np.log(lam)
    log_term = -lam.copy()
    pmf = []
    total = 0.0
    for n in range(n_cap + 1):
        p = float(w @ np.exp(log_term))
        pmf.append(p)
        total += p
        if 1.0 - total <= PMF_TAIL_TOL:
            break
        log_term += log_lam - np.log(n + 1.0)
    tail = max(1.0 - total, 0.0)
    pmf[-1] += tail
    return np.array(pmf), tail > PMF_TAIL_TOL


def _central_interval(pmf, mass=0.90):
    alpha = 0.5 * (1.0 - mass)
    cdf = np.cumsum(pmf)
    lo = int(np.searchsorted(cdf, alpha))
    hi = int(min(np.searchsorted(cdf, 1.0 - alpha), pmf.size - 1))
    return lo, hi


def _count_forecast(lam, w, t, h):
    pmf, folded = _mixture_pmf(lam, w)
    lo, hi = _central_interval(pmf)
    mean = float(np.asarray(w).ravel() @ np.asarray(lam, dtype=float).ravel())
    return CountForecast(t=float(t), h=float(h), pmf=pmf, credible_90=(lo, hi),
                         mean=mean, tail_folded=folded)


def forecast_counts(grid, ctx, t, h=DEFAULT_H_DAYS):
    """Posterior-predictive count distribution on [t, t+h]."""
    if not h > 0.0:
        raise ValueError("h must be > 0")
    lam, w = _node_window_masses(grid, ctx, t, h)
    return _count_forecast(lam, w, t, h)


def forecast_counts_plugin(theta_star, ctx, t, h=DEFAULT_H_DAYS):
    """Plain Poisson forecast at one parameter triple.

    Collapses the posterior to a point, so it under-represents uncertainty;
    kept for comparison with the full mixture.
    """
    if not h > 0.0:
        raise ValueError("h must be > 0")
    lam, w = _node_window_masses(delta_posterior(theta_star), ctx, t, h)
    return _count_forecast(lam, w, t, h)


def forecast_counts_ergodic(grid, ctx, t, h=DEFAULT_H_DAYS):
    """Single Poisson at the posterior-average window mass (comparison only)."""
    if not h > 0.0:
        raise ValueError("h must be > 0")
    lam, w = _node_window_masses(grid, ctx, t, h)
    lam_bar = float((w * lam).sum())
    return _count_forecast(np.array([lam_bar]), np.array([1.0]), t, h)


def default_mag_mesh(m0, mu, step=0.05):
    n = max(1, int(round((mu - m0) / step)))
    return np.linspace(m0, mu, n + 1)


def _mag_at_level(mesh, ccdf, level):
    if ccdf[0] <= level:
        return float(mesh[0])
    return float(np.interp(level, ccdf[::-1], mesh[::-1]))


def forecast_max_magnitude(grid, ctx, t, h=DEFAULT_H_DAYS, mesh=None):
    """Exceedance curve of the largest magnitude on [t, t+h].

    Marginalizes over the same joint grid as the count forecast, so counts
    and magnitudes stay coherent.  Windows that produce no event count as
    never exceeding, which is why ccdf(m0) equals 1 - P(no event).
    """
    if not h > 0.0:
        raise ValueError("h must be > 0")
    m0, mu = ctx.catalog.m0, ctx.mu
    if mesh is None:
        mesh = default_mag_mesh(m0, mu)
    mesh = np.asarray(mesh, dtype=float)
    if mesh[0] < m0 or mesh[-1] > mu or np.any(np.diff(mesh) <= 0.0):
        raise ValueError("mesh must increase within [m0, mu]")

    lam, w = _node_window_masses(grid, ctx, t, h)
    exceed_p = gr_ccdf(mesh[:, None], grid.b_nodes[None, :], m0, mu)
    ccdf = np.empty(mesh.size)
    for i in range(mesh.size):
        ccdf[i] = 1.0 - float(np.sum(w * np.exp(-lam * exceed_p[i][None, :, None])))
    ccdf = np.minimum.accumulate(np.clip(ccdf, 0.0, 1.0))

    lo = _mag_at_level(mesh, ccdf, 0.95)
    hi = _mag_at_level(mesh, ccdf, 0.001)
    return MaxMagForecast(t=float(t), h=float(h), mesh=mesh, ccdf=ccdf,
                          credible=(lo, hi))


def forecast_to_dict(count, maxmag, flags=None):
    """JSON-ready forecast export used by the CLI and the service."""
    out = {
        "t_days": count.t,
        "h_days": count.h,
        "count": {
            "pmf": count.pmf.tolist(),
            "credible_90": [int(count.credible_90[0]), int(count.credible_90[1])],
            "mean": count.mean,
            "tail_folded": count.tail_folded,
        },
        "max_magnitude": {
            "mesh": maxmag.mesh.tolist(),
            "ccdf": maxmag.ccdf.tolist(),
            "credible": [maxmag.credible[0], maxmag.credible[1]],
        },
    }
    out["flags"] = dict(flags) if flags else {}
    return out
