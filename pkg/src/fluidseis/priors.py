"""Joint subjective prior over the rate parameters.

Scaled Beta marginals for the activation feedback and the size ratio, a
Gamma marginal (shape-rate convention) for the relaxation time, combined as
an independent product.  Hyperparameters can be elicited from a collection
of past point estimates by moment matching, mirroring how multi-site
experience is folded into a planning-stage prior.

The shipped default prior is reconstructed from published fitted ranges
(b in [0.77, 1.6], a_fb in [-2.4, 0.1], tau in [0.02, 13.7] days): each
range midpoint becomes the prior mean and a quarter of the range width the
prior standard deviation, on support bounds wide enough to leave margin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import stats

from .rate import RateParams

__all__ = [
    "ScaledBeta",
    "GammaPrior",
    "JointPrior",
    "DegenerateMomentsError",
    "log_prior",
    "fit_prior",
    "sample_prior",
    "default_prior",
    "prior_from_dict",
    "prior_to_dict",
    "load_prior_config",
    "save_prior_config",
]

DEFAULT_BOUNDS = (-4.0, 1.0, 0.5, 2.5)  # l_a, u_a, l_b, u_b

# published fitted ranges the default prior is reconstructed from
RANGE_A_FB = (-2.4, 0.1)
RANGE_B = (0.77, 1.6)
RANGE_TAU = (0.02, 13.7)


class DegenerateMomentsError(ValueError):
    """Sample moments incompatible with the requested family."""


@dataclass(frozen=True)
class ScaledBeta:
    """Beta(p, q) stretched onto the interval [l, u]."""

    p: float
    q: float
    l: float
    u: float

    def __post_init__(self):
        if not (self.p > 0.0 and self.q > 0.0):
            raise ValueError("shape parameters must be > 0")
        if not self.l < self.u:
            raise ValueError("need l < u")

    @property
    def _dist(self):
        return stats.beta(self.p, self.q, loc=self.l, scale=self.u - self.l)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self._dist.logpdf(x)
        return out if out.ndim else float(out)

    @property
    def mean(self):
        return self.l + (self.u - self.l) * self.p / (self.p + self.q)

    @property
    def var(self):
        pq = self.p + self.q
        return (self.u - self.l) ** 2 * self.p * self.q / (pq * pq * (pq + 1.0))

    def sample(self, rng, n):
        return self.l + (self.u - self.l) * rng.beta(self.p, self.q, size=n)


@dataclass(frozen=True)
class GammaPrior:
    """Gamma with shape ``alpha`` and rate ``beta`` (density ~ x**(a-1) e**(-b x))."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("alpha and beta must be > 0")

    @property
    def _dist(self):
        return stats.gamma(self.alpha, scale=1.0 / self.beta)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self._dist.logpdf(x)
        return out if out.ndim else float(out)

    @property
    def mean(self):
        return self.alpha / self.beta

    @property
    def var(self):
        return self.alpha / self.beta**2

    def ppf(self, q):
        return float(self._dist.ppf(q))

    def sample(self, rng, n):
        return rng.gamma(self.alpha, 1.0 / self.beta, size=n)


@dataclass(frozen=True)
class JointPrior:
    """Independent product prior over (a_fb, b, tau)."""

    a_fb: ScaledBeta
    b: ScaledBeta
    tau: GammaPrior

    def log_pdf(self, theta):
        return (float(self.a_fb.log_pdf(theta.a_fb))
                + float(self.b.log_pdf(theta.b))
                + float(self.tau.log_pdf(theta.tau)))


def log_prior(theta, prior):
    """Joint log density at ``theta``; -inf outside the supports."""
    return prior.log_pdf(theta)


def _beta_moments(values, lo, hi):
    x = (np.asarray(values, dtype=float) - lo) / (hi - lo)
    if np.any((x <= 0.0) | (x >= 1.0)):
        raise ValueError("samples must lie strictly inside the bounds")
    xbar = x.mean()
    s2 = x.var(ddof=1)
    if s2 <= 0.0:
        raise DegenerateMomentsError("zero sample variance")
    kappa = xbar * (1.0 - xbar) / s2 - 1.0
    if kappa <= 0.0:
        raise DegenerateMomentsError(
            "sample variance too large for a beta fit on these bounds")
    return xbar * kappa, (1.0 - xbar) * kappa


def fit_prior(mle_samples, bounds=DEFAULT_BOUNDS):
    """Moment-matched prior from past point estimates.

    Beta marginals for a_fb and b on the given (l_a, u_a, l_b, u_b) bounds,
    Gamma for tau; needs at least two samples, all strictly inside the bounds
    with positive tau.
    """
    if len(mle_samples) < 2:
        raise ValueError("need at least 2 samples")
    l_a, u_a, l_b, u_b = bounds
    a = np.array([s.a_fb for s in mle_samples], dtype=float)
    b = np.array([s.b for s in mle_samples], dtype=float)
    tau = np.array([s.tau for s in mle_samples], dtype=float)
    if np.any(tau <= 0.0):
        raise ValueError("tau samples must be > 0")
    p_a, q_a = _beta_moments(a, l_a, u_a)
    p_b, q_b = _beta_moments(b, l_b, u_b)
    mean, s2 = tau.mean(), tau.var(ddof=1)
    if s2 <= 0.0:
        raise DegenerateMomentsError("zero sample variance")
    return JointPrior(
        a_fb=ScaledBeta(p_a, q_a, l_a, u_a),
        b=ScaledBeta(p_b, q_b, l_b, u_b),
        tau=GammaPrior(alpha=mean * mean / s2, beta=mean / s2),
    )


def sample_prior(prior, rng, n):
    """n i.i.d. draws from the product prior."""
    a = prior.a_fb.sample(rng, n)
    b = prior.b.sample(rng, n)
    tau = prior.tau.sample(rng, n)
    return [RateParams(float(ai), float(bi), float(ti)) for ai, bi, ti in zip(a, b, tau)]


def _beta_from_mean_sd(mean, sd, lo, hi):
    xbar = (mean - lo) / (hi - lo)
    s2 = (sd / (hi - lo)) ** 2
    kappa = xbar * (1.0 - xbar) / s2 - 1.0
    return ScaledBeta(xbar * kappa, (1.0 - xbar) * kappa, lo, hi)


def default_prior(bounds=DEFAULT_BOUNDS):
    """The reconstructed range-based prior described in the module docstring."""
    l_a, u_a, l_b, u_b = bounds

    def mid_sd(rng):
        return 0.5 * (rng[0] + rng[1]), 0.25 * (rng[1] - rng[0])

    mean_a, sd_a = mid_sd(RANGE_A_FB)
    mean_b, sd_b = mid_sd(RANGE_B)
    mean_t, sd_t = mid_sd(RANGE_TAU)
    return JointPrior(
        a_fb=_beta_from_mean_sd(mean_a, sd_a, l_a, u_a),
        b=_beta_from_mean_sd(mean_b, sd_b, l_b, u_b),
        tau=GammaPrior(alpha=mean_t**2 / sd_t**2, beta=mean_t / sd_t**2),
    )


def prior_to_dict(prior):
    return {
        "a_fb": {"p": prior.a_fb.p, "q": prior.a_fb.q, "l": prior.a_fb.l, "u": prior.a_fb.u},
        "b": {"p": prior.b.p, "q": prior.b.q, "l": prior.b.l, "u": prior.b.u},
        "tau": {"alpha": prior.tau.alpha, "beta": prior.tau.beta},
    }


def prior_from_dict(cfg):
    return JointPrior(
        a_fb=ScaledBeta(cfg["a_fb"]["p"], cfg["a_fb"]["q"], cfg["a_fb"]["l"], cfg["a_fb"]["u"]),
        b=ScaledBeta(cfg["b"]["p"], cfg["b"]["q"], cfg["b"]["l"], cfg["b"]["u"]),
        tau=GammaPrior(cfg["tau"]["alpha"], cfg["tau"]["beta"]),
    )


def load_prior_config(path=None):
    """Prior from a JSON config file; the packaged default when ``path`` is None."""
    if path is None:
        text = resources.files("fluidseis.data").joinpath("default_prior.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return prior_from_dict(json.loads(text))


def save_prior_config(prior, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(prior_to_dict(prior), fh, indent=2)
        fh.write("\n")
