"""Likelihood kernels against a straight-line NHPP implementation.

The oracle below recomputes the log density of an observed catalog from first
principles: sum of log intensities at the event times, minus the integrated
intensity (by adaptive quadrature), plus the magnitude log densities.  The
library computes the same quantity through sufficient statistics and a
closed-form mass; agreement is the whole point.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from fluidseis import (InjectionProfile, LikelihoodContext, MagnitudeModel,
                       RateParams, SeismicCatalog, SimulationSpec, simulate)
from fluidseis.likelihood import (log_likelihood_complete,
                                  log_likelihood_grid,
                                  log_likelihood_partial, suff_stats)
from fluidseis.magnitudes import gr_log_pdf
from fluidseis.rate import rate_at

from conftest import M0, MU, THETA


def oracle_complete(theta, ctx):
    cat, prof = ctx.catalog, ctx.profile
    pts = [float(x) for x in prof.times if 0 < x < cat.t_end]
    if prof.shut_in and 0 < prof.shut_in < cat.t_end:
        pts.append(float(prof.shut_in))
    mass, _ = quad(lambda s: rate_at(s, theta, prof, cat.m0), 0.0, cat.t_end,
                   points=sorted(set(pts)), limit=400)
    lam = np.array([rate_at(t, theta, prof, cat.m0) for t in cat.times])
    if np.any(lam <= 0.0):
        return -np.inf
    mags = gr_log_pdf(cat.mags, theta.b, cat.m0, ctx.mu)
    return float(np.sum(np.log(lam)) + np.sum(mags) - mass)


@pytest.fixture(scope="module")
def ctx(sim_catalog, const_profile):
    return LikelihoodContext(catalog=sim_catalog, profile=const_profile, mu=MU)


class TestCompleteLikelihood:
    def test_matches_oracle_at_truth(self, ctx):
        assert log_likelihood_complete(THETA, ctx) == pytest.approx(
            oracle_complete(THETA, ctx), abs=1e-6)

    @pytest.mark.parametrize("theta", [
        RateParams(-1.2, 0.9, 0.5),
        RateParams(0.0, 1.5, 8.0),
        RateParams(-2.0, 1.15, 13.0),
    ])
    def test_matches_oracle_off_truth(self, ctx, theta):
        assert log_likelihood_complete(theta, ctx) == pytest.approx(
            oracle_complete(theta, ctx), abs=1e-6)

    def test_matches_oracle_on_step_profile(self, step_profile):
        spec = SimulationSpec(theta=THETA, profile=step_profile,
                              mag=MagnitudeModel(b=THETA.b, m0=M0, mu=MU),
                              t_end=28.0, seed=55)
        cat = simulate(spec)
        c = LikelihoodContext(catalog=cat, profile=step_profile, mu=MU)
        for theta in (THETA, RateParams(-0.9, 1.3, 4.0)):
            assert log_likelihood_complete(theta, c) == pytest.approx(
                oracle_complete(theta, c), abs=1e-6)

    def test_event_during_zero_flow_impossible_for_all_theta(self):
        prof = InjectionProfile.from_breakpoints(
            [(0.0, 0.0), (1.0, 600.0), (5.0, 0.0)], shut_in=5.0)
        cat = SeismicCatalog(np.array([0.4, 2.0]), np.array([1.5, 1.6]),
                             m0=1.0, t_end=9.0)
        c = LikelihoodContext(catalog=cat, profile=prof, mu=MU)
        for theta in (THETA, RateParams(0.9, 0.6, 25.0)):
            assert log_likelihood_complete(theta, c) == -np.inf

    def test_event_exactly_at_shutin_is_finite(self, const_profile):
        ts = const_profile.shut_in
        cat = SeismicCatalog(np.array([1.0, ts]), np.array([1.5, 1.4]),
                             m0=M0, t_end=30.0)
        c = LikelihoodContext(catalog=cat, profile=const_profile, mu=MU)
        got = log_likelihood_complete(THETA, c)
        assert np.isfinite(got)
        assert got == pytest.approx(oracle_complete(THETA, c), abs=1e-6)

    def test_redundant_breakpoints_change_nothing(self, sim_catalog):
        base = InjectionProfile.constant(2400.0, shut_in=20.0)
        padded = InjectionProfile(
            np.array([0.0, 3.0, 7.5, 20.0]),
            np.array([2400.0, 2400.0, 2400.0, 0.0]), shut_in=20.0)
        c1 = LikelihoodContext(catalog=sim_catalog, profile=base, mu=MU)
        c2 = LikelihoodContext(catalog=sim_catalog, profile=padded, mu=MU)
        assert log_likelihood_complete(THETA, c1) == pytest.approx(
            log_likelihood_complete(THETA, c2), rel=1e-14)


class TestPartialLikelihood:
    def test_hand_value_empty_catalog(self):
        # no events on [0, 1] at constant 1000 m3/day: -10^(a - b m0) V(t)
        prof = InjectionProfile.constant(1000.0)
        cat = SeismicCatalog(np.array([]), np.array([]), m0=0.0, t_end=1.0)
        c = LikelihoodContext(catalog=cat, profile=prof, mu=MU, mode="partial")
        theta = RateParams(-1.46, 1.0, 2.0)
        assert log_likelihood_partial(theta, 1.0, c) == pytest.approx(
            -(10.0 ** -1.46) * 1000.0, rel=1e-14)

    def test_exactly_no_tau_dependence(self, sim_catalog, const_profile):
        cut = sim_catalog.truncated(15.0)
        c = LikelihoodContext(catalog=cut, profile=const_profile.without_shutin(),
                              mu=MU, mode="partial")
        vals = {log_likelihood_partial(RateParams(-0.5, 1.15, tau), 15.0, c)
                for tau in (0.01, 0.5, 1.8, 29.0)}
        assert len(vals) == 1

    def test_agrees_with_complete_when_tau_term_vanishes(self, const_profile):
        # before shut-in the two formulations describe the same process,
        # so for a catalog cut at t_now the partial value equals the complete
        # value computed on a profile whose stop is far beyond the window,
        # up to the (tau-dependent) zero decay contribution
        spec = SimulationSpec(theta=THETA, profile=const_profile,
                              mag=MagnitudeModel(b=THETA.b, m0=M0, mu=MU),
                              t_end=12.0, seed=77)
        cat = simulate(spec).truncated(12.0)
        open_prof = const_profile.without_shutin()
        c = LikelihoodContext(catalog=cat, profile=open_prof, mu=MU,
                              mode="partial")
        got = log_likelihood_partial(THETA, 12.0, c)

        prof_late = open_prof.with_shutin(12.0)
        cat_full = SeismicCatalog(cat.times, cat.mags, M0, 12.0)
        c2 = LikelihoodContext(catalog=cat_full, profile=prof_late, mu=MU)
        assert got == pytest.approx(log_likelihood_complete(THETA, c2),
                                    rel=1e-12)

    def test_t_now_before_last_event_rejected(self, sim_catalog, const_profile):
        c = LikelihoodContext(catalog=sim_catalog,
                              profile=const_profile.without_shutin(),
                              mu=MU, mode="partial")
        with pytest.raises(ValueError):
            log_likelihood_partial(THETA, 1.0, c)


class TestGridEvaluation:
    def test_grid_equals_pointwise_complete(self, ctx):
        a = np.array([-1.2, -0.5, 0.2])
        b = np.array([0.9, 1.15, 1.4, 1.6])
        tau = np.array([0.5, 1.8, 4.0, 9.0, 13.0])
        grid = log_likelihood_grid(ctx, a, b, tau)
        assert grid.shape == (3, 4, 5)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                for k, tk in enumerate(tau):
                    want = log_likelihood_complete(RateParams(ai, bj, tk), ctx)
                    assert grid[i, j, k] == pytest.approx(want, rel=1e-12)

    def test_grid_partial_mode_constant_over_tau(self, sim_catalog,
                                                 const_profile):
        cut = sim_catalog.truncated(10.0)
        c = LikelihoodContext(catalog=cut, profile=const_profile.without_shutin(),
                              mu=MU, mode="partial")
        grid = log_likelihood_grid(c, np.array([-0.5]), np.array([1.15]),
                                   np.array([0.1, 2.0, 20.0]), t_now=10.0)
        assert grid[0, 0, 0] == grid[0, 0, 1] == grid[0, 0, 2]

    def test_impossible_catalog_all_minus_inf(self):
        prof = InjectionProfile.from_breakpoints([(0.0, 0.0), (1.0, 600.0),
                                                  (5.0, 0.0)], shut_in=5.0)
        cat = SeismicCatalog(np.array([0.4]), np.array([1.5]), m0=1.0,
                             t_end=9.0)
        c = LikelihoodContext(catalog=cat, profile=prof, mu=MU)
        grid = log_likelihood_grid(c, np.linspace(-3, 0, 4),
                                   np.linspace(0.8, 1.6, 4),
                                   np.linspace(0.5, 9, 4))
        assert np.all(np.isneginf(grid))


class TestContextAndStats:
    def test_complete_requires_shutin(self, sim_catalog):
        with pytest.raises(ValueError):
            LikelihoodContext(catalog=sim_catalog,
                              profile=InjectionProfile.constant(2400.0), mu=MU)

    def test_mu_must_exceed_m0(self, sim_catalog, const_profile):
        with pytest.raises(ValueError):
            LikelihoodContext(catalog=sim_catalog, profile=const_profile,
                              mu=0.5)

    def test_t_now_truncates_stats(self, sim_catalog, const_profile):
        s_all = suff_stats(sim_catalog, const_profile, "complete")
        s_cut = suff_stats(sim_catalog, const_profile, "complete", t_now=10.0)
        assert s_cut.n < s_all.n
        assert s_cut.n == int(np.sum(sim_catalog.times <= 10.0))
