"""Point estimation and grid-based Bayesian inference for the rate parameters.

The posterior lives on a fixed tensor grid of (a_fb, b, tau) nodes spanning
the prior supports.  Quadrature is deterministic: trapezoidal cell volumes,
log-sum-exp normalization, no sampling anywhere.  Three parameters make this
cheap and exactly reproducible, which an online service needs more than the
generality of MCMC.

Node weights multiply cell volume into the density, so ``weights`` are
probability masses summing to one; argmax-style quantities (the MAP) use the
volume-free ``log_unnorm`` values instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from .likelihood import log_likelihood_grid
from .rate import RateParams, cumulative_shape

__all__ = [
    "GridSpec",
    "PosteriorGrid",
    "PosteriorSummary",
    "MleFit",
    "EvidenceUnderflowError",
    "FitFailureError",
    "build_axes",
    "compute_posterior",
    "delta_posterior",
    "summarize",
    "mle_fit",
    "bayes_average_cumulative",
    "bayes_average_from_mixture",
    "posterior_to_dict",
]

DEFAULT_FIT_BOUNDS = ((-4.0, 1.0), (0.5, 2.5), (0.01, 30.0))

PARAM_NAMES = ("a_fb", "b", "tau")


class EvidenceUnderflowError(RuntimeError):
    """Every grid node carries zero posterior mass (prior/data conflict)."""


class FitFailureError(RuntimeError):
    """No optimizer start produced a finite likelihood."""


@dataclass(frozen=True)
class GridSpec:
    """Nodes per axis plus an optional explicit tau range."""

    n_a: int = 64
    n_b: int = 64
    n_tau: int = 64
    tau_lo: float | None = None
    tau_hi: float | None = None

    def __post_init__(self):
        if min(self.n_a, self.n_b, self.n_tau) < 16:
            raise ValueError("need at least 16 nodes per axis")


def _interior_nodes(lo, hi, n):
    return np.linspace(lo, hi, n + 2)[1:-1]


def _trapezoid_weights(x):
    w = np.empty_like(x)
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    return w


def build_axes(prior, spec=None):
    """Grid axes spanning the prior: interior nodes for the bounded Beta
    marginals, a tau axis cut at the Gamma's 0.999 quantile.  The tau floor
    0.02 keeps the axis covering the small-relaxation end of published fits
    even when the prior puts little mass there."""
    spec = spec or GridSpec()
    a = _interior_nodes(prior.a_fb.l, prior.a_fb.u, spec.n_a)
    b = _interior_nodes(prior.b.l, prior.b.u, spec.n_b)
    tau_lo = spec.tau_lo if spec.tau_lo is not None else min(0.02, prior.tau.ppf(1e-4))
    tau_hi = spec.tau_hi if spec.tau_hi is not None else prior.tau.ppf(0.999)
    if not 0.0 < tau_lo < tau_hi:
        raise ValueError("bad tau axis range")
    tau = np.linspace(tau_lo, tau_hi, spec.n_tau)
    return a, b, tau


@dataclass(frozen=True, eq=False)
class PosteriorGrid:
    """Discretized joint posterior over (a_fb, b, tau)."""

    a_nodes: np.ndarray
    b_nodes: np.ndarray
    tau_nodes: np.ndarray
    log_unnorm: np.ndarray   # log prior + log likelihood per node
    weights: np.ndarray      # normalized probability masses, sum 1
    log_evidence: float

    @property
    def axes(self):
        return self.a_nodes, self.b_nodes, self.tau_nodes

    def marginal(self, name):
        """Probability mass per node of one axis ('a_fb', 'b' or 'tau')."""
        k = PARAM_NAMES.index(name)
        other = tuple(i for i in range(3) if i != k)
        return self.weights.sum(axis=other)

    def mean(self):
        m = [float(self.marginal(n) @ ax) for n, ax in zip(PARAM_NAMES, self.axes)]
        return RateParams(*m)

    def map_node(self):
        """Index triple of the highest unnormalized posterior density."""
        return np.unravel_index(int(np.argmax(self.log_unnorm)), self.log_unnorm.shape)

    def moments(self):
        """(mean vector, covariance matrix) under the grid masses."""
        axes = self.axes
        mean = np.array([self.marginal(n) @ ax for n, ax in zip(PARAM_NAMES, axes)])
        cov = np.empty((3, 3))
        for i in range(3):
            for j in range(i, 3):
                if i == j:
                    second = self.marginal(PARAM_NAMES[i]) @ (axes[i] ** 2)
                else:
                    sub = "ijk"
                    ein = f"ijk,{sub[i]},{sub[j]}->"
                    second = np.einsum(ein, self.weights, axes[i], axes[j])
                cov[i, j] = cov[j, i] = second - mean[i] * mean[j]
        return mean, cov

    def productivity_mixture(self, m0):
        """Per-tau-node coefficients c_k with
        bayes-average Lam(t) = sum_k c_k * cumulative_shape(t, tau_k)."""
        s = 10.0 ** (self.a_nodes[:, None] - m0 * self.b_nodes[None, :])
        return np.einsum("ijk,ij->k", self.weights, s)


def compute_posterior(ctx, prior, grid_spec=None, axes=None, t_now=None):
    """Posterior grid from prior times likelihood.

    ``axes`` overrides ``grid_spec`` with preassembled node arrays so an
    online session can keep one fixed grid across updates.  ``t_now``
    truncates the record (0 gives back the prior exactly).
    """
    if axes is None:
        axes = build_axes(prior, grid_spec)
    a, b, tau = (np.asarray(ax, dtype=float) for ax in axes)

    log_p = (np.asarray(prior.a_fb.log_pdf(a)),
             np.asarray(prior.b.log_pdf(b)),
             np.asarray(prior.tau.log_pdf(tau)))
    ll = log_likelihood_grid(ctx, a, b, tau, t_now=t_now)
    log_unnorm = (ll + log_p[0][:, None, None] + log_p[1][None, :, None]
                  + log_p[2][None, None, :])

    log_vol = (np.log(_trapezoid_weights(a))[:, None, None]
               + np.log(_trapezoid_weights(b))[None, :, None]
               + np.log(_trapezoid_weights(tau))[None, None, :])
    lw = log_unnorm + log_vol
    log_evidence = float(logsumexp(lw))
    if not np.isfinite(log_evidence):
        raise EvidenceUnderflowError(
            "posterior mass underflowed on every node; the prior and the data "
            "are irreconcilable on this grid")
    return PosteriorGrid(a, b, tau, log_unnorm, np.exp(lw - log_evidence),
                         log_evidence)


def delta_posterior(theta):
    """Single-node grid carrying all mass at ``theta`` (plug-in view)."""
    return PosteriorGrid(
        np.array([theta.a_fb]), np.array([theta.b]), np.array([theta.tau]),
        log_unnorm=np.zeros((1, 1, 1)), weights=np.ones((1, 1, 1)),
        log_evidence=0.0)


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    mean: RateParams
    map: RateParams
    mle: RateParams | None
    marginals: dict          # axis name -> probability masses
    corr: np.ndarray         # 3x3 Pearson, unit diagonal
    sd: tuple                # marginal standard deviations
    degenerate: bool         # some axis carried zero variance


def _neg_log_posterior(ctx, prior, t_now):
    def f(z):
        try:
            theta = RateParams(float(z[0]), float(z[1]), float(z[2]))
        except ValueError:
            return 1e300
        lp = prior.log_pdf(theta)
        if not np.isfinite(lp):
            return 1e300
        ll = float(log_likelihood_grid(ctx, z[:1], z[1:2], z[2:3], t_now=t_now)[0, 0, 0])
        return -(lp + ll) if np.isfinite(ll) else 1e300
    return f


def _polish_map(grid, node, ctx, prior, t_now):
    # one bounded derivative-free refinement confined to the argmax cell
    i, j, k = node
    axes = grid.axes
    lo = [axes[d][max(idx - 1, 0)] for d, idx in enumerate(node)]
    hi = [axes[d][min(idx + 1, axes[d].size - 1)] for d, idx in enumerate(node)]
    x0 = np.array([axes[0][i], axes[1][j], axes[2][k]])
    if any(l >= h for l, h in zip(lo, hi)):
        return RateParams(*x0)
    f = _neg_log_posterior(ctx, prior, t_now)
    res = optimize.minimize(f, x0, method="Nelder-Mead",
                            bounds=optimize.Bounds(np.array(lo), np.array(hi)),
                            options={"maxfev": 200, "xatol": 1e-8, "fatol": 1e-10})
    if np.isfinite(res.fun) and res.fun <= f(x0):
        return RateParams(*(float(v) for v in res.x))
    return RateParams(*x0)


def summarize(grid, ctx=None, prior=None, mle=None, t_now=None):
    """Posterior summary: mean, MAP, marginals, correlation matrix.

    The MAP starts from the argmax node and, when ``ctx`` and ``prior`` are
    given, is polished off-grid within its cell.  ``mle`` is attached as-is
    when the caller has one.
    """
    mean_vec, cov = grid.moments()
    var = np.clip(np.diag(cov), 0.0, None)
    degenerate = bool(np.any(var <= 0.0))
    sd = np.sqrt(var)
    denom = np.outer(sd, sd)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0.0, cov / np.where(denom > 0.0, denom, 1.0), 0.0)
    np.fill_diagonal(corr, 1.0)

    node = grid.map_node()
    if ctx is not None and prior is not None:
        map_theta = _polish_map(grid, node, ctx, prior, t_now)
    else:
        i, j, k = node
        map_theta = RateParams(float(grid.a_nodes[i]), float(grid.b_nodes[j]),
                               float(grid.tau_nodes[k]))

    marginals = {n: grid.marginal(n) for n in PARAM_NAMES}
    return PosteriorSummary(
        mean=RateParams(*(float(v) for v in mean_vec)),
        map=map_theta, mle=mle, marginals=marginals,
        corr=corr, sd=tuple(float(v) for v in sd), degenerate=degenerate)


@dataclass(frozen=True)
class MleFit:
    theta: RateParams
    log_likelihood: float
    at_bounds: tuple          # per-component boundary-pin flags
    tau_identified: bool      # False when the data carry no tau information


def mle_fit(ctx, init=None, bounds=DEFAULT_FIT_BOUNDS, t_now=None):
    """Maximum-likelihood triple by bounded Nelder-Mead multistart.

    Eight seeded starts (the init plus seven deterministic draws) and a
    restart from the incumbent; tau is searched in log scale.  In partial
    mode tau is not identified: it stays at ``init.tau`` and the fit is
    flagged accordingly.
    """
    (a_lo, a_hi), (b_lo, b_hi), (t_lo, t_hi) = bounds
    if init is None:
        init = RateParams(0.5 * (a_lo + a_hi), 0.5 * (b_lo + b_hi),
                          float(np.sqrt(t_lo * t_hi)))
    if not (a_lo <= init.a_fb <= a_hi and b_lo <= init.b <= b_hi
            and t_lo <= init.tau <= t_hi):
        raise ValueError("init must lie inside the bounds")

    partial = ctx.mode == "partial"
    tau_fixed = init.tau

    def nll(z):
        tau = tau_fixed if partial else float(np.exp(z[2]))
        ll = float(log_likelihood_grid(ctx, z[:1], z[1:2], [tau], t_now=t_now)[0, 0, 0])
        return -ll if np.isfinite(ll) else 1e300

    z_lo = np.array([a_lo, b_lo] + ([] if partial else [np.log(t_lo)]))
    z_hi = np.array([a_hi, b_hi] + ([] if partial else [np.log(t_hi)]))
    z_init = np.array([init.a_fb, init.b] + ([] if partial else [np.log(init.tau)]))

    rng = np.random.default_rng(20210607)
    starts = [z_init] + [rng.uniform(z_lo, z_hi) for _ in range(7)]
    starts = [z for z in starts if nll(z) < 1e300]
    if not starts:
        raise FitFailureError("likelihood non-finite at every start")

    def run(z0):
        return optimize.minimize(
            nll, z0, method="Nelder-Mead", bounds=optimize.Bounds(z_lo, z_hi),
            options={"maxfev": 600 * z0.size, "xatol": 1e-7, "fatol": 1e-10})

    best = min((run(z0) for z0 in starts), key=lambda r: r.fun)
    best = min([best, run(np.asarray(best.x))], key=lambda r: r.fun)
    if best.fun >= 1e300:
        raise FitFailureError("optimizer never left the impossible region")

    z = np.asarray(best.x, dtype=float)
    theta = RateParams(float(z[0]), float(z[1]),
                       tau_fixed if partial else float(np.exp(z[2])))
    tol = 1e-6
    pinned = [bool(min(z[i] - z_lo[i], z_hi[i] - z[i]) < tol * (z_hi[i] - z_lo[i]))
              for i in range(z.size)]
    if partial:
        pinned.append(False)
    return MleFit(theta=theta, log_likelihood=float(-best.fun),
                  at_bounds=tuple(pinned), tau_identified=not partial)


def bayes_average_cumulative(grid, t, ctx):
    """Posterior-weighted expected count on [0, t]; vectorized over t."""
    c = grid.productivity_mixture(ctx.catalog.m0)
    t_arr = np.asarray(t, dtype=float)
    g = cumulative_shape(t_arr[..., None], grid.tau_nodes, ctx.profile)
    out = g @ c
    return float(out) if t_arr.ndim == 0 else out


def bayes_average_from_mixture(tau_nodes, coefficients, profile):
    """Rebuild the bayes-average cumulative-rate function from exported
    mixture coefficients (see posterior_to_dict)."""
    tau_nodes = np.asarray(tau_nodes, dtype=float)
    coefficients = np.asarray(coefficients, dtype=float)

    def cumulative(t):
        t_arr = np.asarray(t, dtype=float)
        g = cumulative_shape(t_arr[..., None], tau_nodes, profile)
        out = g @ coefficients
        return float(out) if t_arr.ndim == 0 else out

    return cumulative


def _params_dict(p):
    return None if p is None else {"a_fb": p.a_fb, "b": p.b, "tau": p.tau}


def posterior_to_dict(grid, summary, m0):
    """JSON-ready posterior export.

    ``tau_mixture`` carries the coefficients that reconstruct the
    bayes-average cumulative rate without shipping the full weight tensor.
    """
    a, b, tau = grid.axes
    return {
        "axes": {"a_fb": a.tolist(), "b": b.tolist(), "tau": tau.tolist()},
        "marginals": {n: summary.marginals[n].tolist() for n in PARAM_NAMES},
        "mean": _params_dict(summary.mean),
        "map": _params_dict(summary.map),
        "mle": _params_dict(summary.mle),
        "corr": summary.corr.tolist(),
        "sd": list(summary.sd),
        "log_evidence": grid.log_evidence,
        "m0": m0,
        "tau_mixture": {"tau": tau.tolist(),
                        "coefficients": grid.productivity_mixture(m0).tolist()},
    }
