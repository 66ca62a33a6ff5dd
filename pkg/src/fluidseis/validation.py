"""Residual analysis for fitted rate models.

Event times are mapped through a candidate cumulative rate; if the model is
right, the rescaled times form a unit-rate Poisson process.  Departures are
scored with Kolmogorov-Smirnov band tests on the rescaled times and on
Berman's transformed inter-arrival gaps, plus a lag-1 scatter of the gap
scores for serial dependence.

The KS bands treat the candidate as fixed.  When the model was fitted on the
same catalog the test is anti-conservative (rejects less often than the
nominal level suggests); the calibration tests quantify this empirically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .inference import bayes_average_cumulative, mle_fit, summarize
from .rate import cumulative_rate

__all__ = [
    "RescaledTimes",
    "KsReport",
    "BermanResult",
    "LagScatter",
    "ModelValidation",
    "InsufficientSampleError",
    "rescale",
    "ks_bands",
    "ks_test",
    "berman_test",
    "lag_scatter",
    "validate_models",
    "validate_model_suite",
    "validation_to_dict",
]

# asymptotic two-sided KS quantiles c(alpha), valid from roughly n = 35 up
KS_C95 = 1.358
KS_C99 = 1.628
ASYMPTOTIC_MIN_N = 35


class InsufficientSampleError(ValueError):
    """Too few events for the requested test."""


@dataclass(frozen=True, eq=False)
class RescaledTimes:
    taus: np.ndarray    # strictly increasing, in [0, total]
    total: float        # expected count over the whole window


@dataclass(frozen=True, eq=False)
class KsReport:
    d_n: float
    n: int
    band_95: float
    band_99: float
    pass_95: bool
    pass_99: bool
    ecdf: np.ndarray    # sorted unit-interval scores; ECDF steps at (i+1)/n


@dataclass(frozen=True, eq=False)
class BermanResult:
    ks: KsReport
    scores: np.ndarray  # U_n in event order, for the independence scatter


@dataclass(frozen=True, eq=False)
class LagScatter:
    pairs: np.ndarray   # (n-1, 2) of (U_n, U_n+1)
    rank_corr: float


@dataclass(frozen=True, eq=False)
class ModelValidation:
    name: str
    theta: object       # RateParams, or None for the bayes average
    ks: KsReport
    berman: BermanResult
    lag: LagScatter


def rescale(catalog, cumulative):
    """Map event times through ``cumulative``; unit-rate gaps if the model fits.

    ``cumulative`` is any vectorized nondecreasing t -> expected-count
    function.  Ties after mapping (events inside a zero-rate stretch) are
    rejected, since every test below needs distinct rescaled times.
    """
    taus = np.asarray(cumulative(catalog.times), dtype=float)
    if taus.size and not np.all(np.diff(taus) > 0.0):
        raise ValueError("cumulative rate is not strictly increasing across events")
    total = float(cumulative(catalog.t_end))
    if taus.size and (taus[0] < 0.0 or taus[-1] > total):
        raise ValueError("rescaled times fall outside [0, total]")
    return RescaledTimes(taus=taus, total=total)


def ks_bands(n):
    """(95%, 99%) two-sided KS critical distances for sample size n."""
    if n < ASYMPTOTIC_MIN_N:
        return (float(stats.kstwo.isf(0.05, n)), float(stats.kstwo.isf(0.01, n)))
    root = np.sqrt(n)
    return KS_C95 / root, KS_C99 / root


def _uniform_ks(scores):
    n = scores.size
    if n < 5:
        raise InsufficientSampleError("need at least 5 events")
    u = np.sort(scores)
    i = np.arange(1, n + 1)
    d_n = float(np.max(np.maximum(i / n - u, u - (i - 1) / n)))
    b95, b99 = ks_bands(n)
    return KsReport(d_n=float(d_n), n=n, band_95=b95, band_99=b99,
                    pass_95=bool(d_n <= b95), pass_99=bool(d_n <= b99), ecdf=u)


def ks_test(rescaled):
    """KS distance of tau_n / total against the uniform law on [0, 1]."""
    if rescaled.total <= 0.0:
        raise ValueError("total expected count must be positive")
    return _uniform_ks(rescaled.taus / rescaled.total)


def berman_test(rescaled):
    """Uniformity of U_n = 1 - exp(-(tau_n - tau_{n-1})), with tau_0 = 0."""
    gaps = np.diff(rescaled.taus, prepend=0.0)
    scores = -np.expm1(-gaps)
    return BermanResult(ks=_uniform_ks(scores), scores=scores)


def lag_scatter(scores):
    """Lag-1 pairs of the gap scores plus their Spearman rank correlation."""
    scores = np.asarray(scores, dtype=float)
    if scores.size < 2:
        raise InsufficientSampleError("need at least 2 scores")
    pairs = np.column_stack([scores[:-1], scores[1:]])
    if pairs.shape[0] < 2:
        rho = 0.0
    else:
        rho = stats.spearmanr(pairs[:, 0], pairs[:, 1]).statistic
        rho = float(rho) if np.isfinite(rho) else 0.0
    return LagScatter(pairs=pairs, rank_corr=rho)


def validate_models(catalog, cumulatives):
    """Run the full residual battery for each named cumulative-rate function."""
    out = {}
    for name, (theta, cumulative) in cumulatives.items():
        rescaled = rescale(catalog, cumulative)
        berman = berman_test(rescaled)
        out[name] = ModelValidation(
            name=name, theta=theta, ks=ks_test(rescaled), berman=berman,
            lag=lag_scatter(berman.scores))
    return out


def validate_model_suite(catalog, ctx, grid, summary=None, mle=None):
    """The four-model comparison: MLE, MAP and posterior-mean plug-ins plus
    the bayes-average rate, all validated against the same catalog."""
    if mle is None:
        mle = mle_fit(ctx).theta
    if summary is None:
        summary = summarize(grid, mle=mle)
    m0 = catalog.m0

    def point(theta):
        return theta, lambda t: cumulative_rate(t, theta, ctx.profile, m0)

    cumulatives = {
        "mle": point(summary.mle if summary.mle is not None else mle),
        "map": point(summary.map),
        "mean": point(summary.mean),
        "bayes_average": (None, lambda t: bayes_average_cumulative(grid, t, ctx)),
    }
    return validate_models(catalog, cumulatives)


def _params_dict(p):
    return None if p is None else {"a_fb": p.a_fb, "b": p.b, "tau": p.tau}


def _ks_dict(r):
    return {"d_n": r.d_n, "n": r.n, "band_95": r.band_95, "band_99": r.band_99,
            "pass_95": r.pass_95, "pass_99": r.pass_99, "ecdf": r.ecdf.tolist()}


def validation_to_dict(results):
    """JSON-ready report for the whole model suite."""
    return {
        "models": {
            name: {
                "theta": _params_dict(v.theta),
                "ks": _ks_dict(v.ks),
                "berman": _ks_dict(v.berman.ks),
                "scores": v.berman.scores.tolist(),
                "lag_pairs": v.lag.pairs.tolist(),
                "lag_rank_corr": v.lag.rank_corr,
            }
            for name, v in results.items()
        }
    }
