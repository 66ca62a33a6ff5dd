"""Compare the full posterior-mixture count forecast with its two cheaper
approximations.

The mixture propagates parameter uncertainty into the predictive counts; the
plug-in collapses the posterior to a point first, and the ergodic variant
averages the rate before applying the count law.  Both shortcuts give the
same mean but strictly narrower intervals, which is exactly how short-term
hazard gets understated.
"""

import numpy as np

from fluidseis import (GridSpec, InjectionProfile, LikelihoodContext,
                       MagnitudeModel, RateParams, SeismicCatalog,
                       SimulationSpec, compute_posterior, forecast_counts,
                       forecast_counts_ergodic, forecast_counts_plugin,
                       forecast_max_magnitude, load_prior_config, simulate,
                       summarize)

TRUTH = RateParams(-0.5, 1.2, 2.0)
M0 = 0.8

profile = InjectionProfile.constant(2400.0, shut_in=6.0)
catalog = simulate(SimulationSpec(
    theta=TRUTH, profile=profile, mag=MagnitudeModel(b=1.2, m0=M0, mu=7.0),
    t_end=12.0, seed=8))
ctx = LikelihoodContext(catalog=catalog, profile=profile, mu=7.0,
                        mode="complete")
prior = load_prior_config()

# forecast from halfway through the injection phase: the posterior there is
# wide, which is where the approximations differ the most
k = int(np.searchsorted(catalog.times, 1.0, side="right"))
early = SeismicCatalog(times=catalog.times[:k], mags=catalog.mags[:k],
                       m0=M0, t_end=1.0)
ectx = LikelihoodContext(catalog=early, profile=profile, mu=7.0,
                         mode="partial")
grid = compute_posterior(ectx, prior, GridSpec(48, 48, 48), t_now=1.0)
mean_theta = summarize(grid).mean

T0, H = 1.0, 4.0 / 24.0
mixture = forecast_counts(grid, ectx, T0, H)
plugin = forecast_counts_plugin(mean_theta, ectx, T0, H)
ergodic = forecast_counts_ergodic(grid, ectx, T0, H)

print(f"count forecast for the 4 h after day 1 ({k} events seen):")
print(f"{'':10s}{'mean':>7s}{'sd':>7s}{'90% interval':>15s}")
for name, fc in (("mixture", mixture), ("plug-in", plugin),
                 ("ergodic", ergodic)):
    n = np.arange(fc.pmf.size)
    mu1 = float(np.sum(n * fc.pmf))
    sd = float(np.sqrt(np.sum((n - mu1) ** 2 * fc.pmf)))
    lo, hi = fc.credible_90
    print(f"{name:10s}{fc.mean:7.2f}{sd:7.2f}{f'[{lo}, {hi}]':>15s}")

width = lambda fc: fc.credible_90[1] - fc.credible_90[0]
print(f"\ninterval width: mixture {width(mixture)}, plug-in {width(plugin)}, "
      f"ergodic {width(ergodic)}")
print("the ergodic variant keeps the mixture mean exactly; both shortcuts"
      "\nare narrower because parameter uncertainty never reaches the counts")

maxmag = forecast_max_magnitude(grid, ectx, T0, H)
lo_m, hi_m = maxmag.credible
print(f"\nmax-magnitude ccdf over the same window:")
print(f"  P(at least one event)     = {maxmag.ccdf[0]:.3f}")
print(f"  P(max magnitude > 2.0)    = "
      f"{np.interp(2.0, maxmag.mesh, maxmag.ccdf):.3f}")
print(f"  P(max magnitude > 3.0)    = "
      f"{np.interp(3.0, maxmag.mesh, maxmag.ccdf):.3f}")
print(f"  asymmetric interval: 5% below {lo_m:.2f}, 0.1% above {hi_m:.2f}")
