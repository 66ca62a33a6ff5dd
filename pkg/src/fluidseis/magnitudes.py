"""Truncated Gutenberg-Richter magnitude distribution.

Density on the closed support [m0, mu]::

    f(m | b) = b ln(10) 10**(-b (m - m0)) / (1 - 10**(-b (mu - m0)))

The module-level ``gr_*`` functions broadcast over ``b`` so likelihood code
can evaluate whole parameter grids; ``MagnitudeModel`` bundles fixed bounds
with one b value for sampling and plotting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MagnitudeModel",
    "gr_log_pdf",
    "gr_pdf",
    "gr_ccdf",
    "gr_cdf",
    "gr_sample",
    "DEFAULT_M_UPPER",
]

LN10 = np.log(10.0)

# Upper truncation used when a caller gives none.  The bound is a modeling
# choice, not an estimate of the largest possible event.
DEFAULT_M_UPPER = 7.0


def _norm(b, m0, mu):
    # 1 - 10**(-b (mu - m0)), computed stably for large b*(mu - m0)
    return -np.expm1(-np.asarray(b) * LN10 * (mu - m0))


def gr_log_pdf(m, b, m0, mu):
    """log density; -inf outside [m0, mu].  Broadcasts over m and b."""
    m = np.asarray(m, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.log(b) + np.log(LN10) - b * LN10 * (m - m0) - np.log(_norm(b, m0, mu))
    out = np.where((m >= m0) & (m <= mu), out, -np.inf)
    return out if out.ndim else float(out)


def gr_pdf(m, b, m0, mu):
    """Density; 0 outside the support.  Broadcasts over m and b."""
    out = np.exp(gr_log_pdf(m, b, m0, mu))
    return out if np.ndim(out) else float(out)


def gr_ccdf(m, b, m0, mu):
    """P(M > m | b): 1 below m0, 0 above mu.  Broadcasts over m and b."""
    m = np.asarray(m, dtype=float)
    b = np.asarray(b, dtype=float)
    mc = np.clip(m, m0, mu)
    num = np.exp(-b * LN10 * (mc - m0)) - np.exp(-b * LN10 * (mu - m0))
    out = np.where(m <= m0, 1.0, np.where(m >= mu, 0.0, num / _norm(b, m0, mu)))
    return out if out.ndim else float(out)


def gr_cdf(m, b, m0, mu):
    """P(M <= m | b).  Broadcasts over m and b."""
    out = 1.0 - gr_ccdf(m, b, m0, mu)
    return out if np.ndim(out) else float(out)


def gr_sample(b, m0, mu, rng, n):
    """n i.i.d. draws by inverse-CDF transform of uniforms from ``rng``."""
    u = rng.random(n)
    return m0 - np.log10(1.0 - u * _norm(b, m0, mu)) / b


@dataclass(frozen=True)
class MagnitudeModel:
    """Gutenberg-Richter slope b with truncation bounds m0 < mu."""

    b: float
    m0: float
    mu: float = DEFAULT_M_UPPER

    def __post_init__(self):
        if not self.b > 0.0:
            raise ValueError("b must be > 0")
        if not self.m0 < self.mu:
            raise ValueError("need m0 < mu")

    def pdf(self, m):
        return gr_pdf(m, self.b, self.m0, self.mu)

    def log_pdf(self, m):
        return gr_log_pdf(m, self.b, self.m0, self.mu)

    def ccdf(self, m):
        return gr_ccdf(m, self.b, self.m0, self.mu)

    def cdf(self, m):
        return gr_cdf(m, self.b, self.m0, self.mu)

    def sample(self, rng, n):
        return gr_sample(self.b, self.m0, self.mu, rng, n)
