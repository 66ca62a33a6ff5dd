import numpy as np
import pytest

from fluidseis import (GridSpec, InjectionProfile, LikelihoodContext,
                       MagnitudeModel, RateParams, SeismicCatalog,
                       SimulationSpec, simulate)
from fluidseis.inference import (EvidenceUnderflowError, FitFailureError,
                                 bayes_average_cumulative,
                                 bayes_average_from_mixture, build_axes,
                                 compute_posterior, delta_posterior, mle_fit,
                                 posterior_to_dict, summarize)
from fluidseis.priors import (GammaPrior, JointPrior, ScaledBeta,
                              default_prior, log_prior)
from fluidseis.rate import cumulative_rate

from conftest import M0, MU, THETA


@pytest.fixture(scope="module")
def ctx(sim_catalog, const_profile):
    return LikelihoodContext(catalog=sim_catalog, profile=const_profile, mu=MU)


@pytest.fixture(scope="module")
def grid(ctx):
    return compute_posterior(ctx, default_prior(), GridSpec(40, 40, 40))


def flat_prior():
    # uniform on the support box; the tau factor decays so slowly it is
    # constant to 14 digits over any practical axis
    return JointPrior(a_fb=ScaledBeta(1.0, 1.0, -4.0, 1.0),
                      b=ScaledBeta(1.0, 1.0, 0.5, 2.5),
                      tau=GammaPrior(1.0, 1e-12))


class TestAxes:
    def test_nodes_strictly_inside_support(self):
        axes = build_axes(default_prior(), GridSpec(32, 32, 32))
        a, b, tau = axes
        assert -4.0 < a[0] and a[-1] < 1.0
        assert 0.5 < b[0] and b[-1] < 2.5
        assert tau[0] > 0.0
        assert len(a) == len(b) == len(tau) == 32

    def test_tau_axis_covers_published_range(self):
        a, b, tau = build_axes(default_prior(), GridSpec(64, 64, 64))
        assert tau[0] <= 0.02
        assert tau[-1] >= 13.7


class TestPosteriorGrid:
    def test_weights_sum_to_one(self, grid):
        assert abs(grid.weights.sum() - 1.0) < 1e-9
        assert np.all(grid.weights >= 0.0)
        assert np.isfinite(grid.log_evidence)

    def test_marginals_are_consistent(self, grid):
        for name in ("a_fb", "b", "tau"):
            assert grid.marginal(name).sum() == pytest.approx(1.0, abs=1e-9)
        mean = grid.mean()
        m, cov = grid.moments()
        assert mean.a_fb == pytest.approx(m[0], rel=1e-12)
        assert np.all(np.diag(cov) > 0.0)

    def test_mean_recovers_truth_roughly(self, grid):
        mean = grid.mean()
        assert abs(mean.a_fb - THETA.a_fb) < 0.1
        assert abs(mean.b - THETA.b) < 0.1
        assert abs(mean.tau - THETA.tau) / THETA.tau < 0.25

    def test_flat_prior_argmax_within_one_cell_of_mle(self, ctx):
        fit = mle_fit(ctx)
        t = fit.theta
        axes = (np.linspace(t.a_fb - 0.3, t.a_fb + 0.3, 41),
                np.linspace(t.b - 0.25, t.b + 0.25, 41),
                np.linspace(max(t.tau - 0.8, 0.05), t.tau + 0.8, 41))
        g = compute_posterior(ctx, flat_prior(), axes=axes)
        i, j, k = g.map_node()
        steps = [ax[1] - ax[0] for ax in axes]
        assert abs(axes[0][i] - t.a_fb) <= steps[0]
        assert abs(axes[1][j] - t.b) <= steps[1]
        assert abs(axes[2][k] - t.tau) <= steps[2]

    def test_empty_data_returns_prior(self, const_profile):
        prior = default_prior()
        cat = SeismicCatalog(np.array([]), np.array([]), m0=M0, t_end=0.0)
        c = LikelihoodContext(catalog=cat,
                              profile=const_profile.without_shutin(),
                              mu=MU, mode="partial")
        axes = build_axes(prior, GridSpec(24, 24, 24))
        g = compute_posterior(c, prior, axes=axes, t_now=0.0)

        # prior-only masses over the same axes
        la = np.array([prior.a_fb.log_pdf(x) for x in axes[0]])
        lb = np.array([prior.b.log_pdf(x) for x in axes[1]])
        lt = np.array([prior.tau.log_pdf(x) for x in axes[2]])
        lw = la[:, None, None] + lb[None, :, None] + lt[None, None, :]
        from fluidseis.inference import _trapezoid_weights
        vol = (_trapezoid_weights(axes[0])[:, None, None]
               * _trapezoid_weights(axes[1])[None, :, None]
               * _trapezoid_weights(axes[2])[None, None, :])
        lw = lw + np.log(vol)
        w = np.exp(lw - lw.max())
        w /= w.sum()
        assert np.max(np.abs(np.log(g.weights) - np.log(w))) < 1e-10

    def test_underflow_raises(self, const_profile):
        prof = InjectionProfile.from_breakpoints(
            [(0.0, 0.0), (1.0, 600.0), (5.0, 0.0)], shut_in=5.0)
        cat = SeismicCatalog(np.array([0.4]), np.array([1.5]), m0=1.0,
                             t_end=9.0)
        c = LikelihoodContext(catalog=cat, profile=prof, mu=MU)
        with pytest.raises(EvidenceUnderflowError):
            compute_posterior(c, default_prior(), GridSpec(16, 16, 16))

    def test_refinement_stability(self, ctx):
        prior = default_prior()
        coarse = compute_posterior(ctx, prior, GridSpec(48, 48, 48)).mean()
        fine = compute_posterior(ctx, prior, GridSpec(96, 96, 96)).mean()
        assert abs(coarse.a_fb - fine.a_fb) < 0.02
        assert abs(coarse.b - fine.b) < 0.02
        assert abs(coarse.tau - fine.tau) < 0.15

    def test_posterior_tightens_with_data(self, sim_catalog, const_profile):
        # needs axes fine enough to resolve the (a_fb, b) ridge, otherwise
        # the measured sd is just cell-size noise
        prior = default_prior()
        open_prof = const_profile.without_shutin()
        axes = (np.linspace(-1.6, 0.4, 51), np.linspace(0.85, 1.55, 51),
                np.linspace(0.05, 16.0, 41))

        def sd_a(t_now):
            cut = sim_catalog.truncated(t_now)
            c = LikelihoodContext(catalog=cut, profile=open_prof, mu=MU,
                                  mode="partial")
            g = compute_posterior(c, prior, axes=axes, t_now=t_now)
            _, cov = g.moments()
            return np.sqrt(cov[0, 0])

        assert sd_a(15.0) < sd_a(5.0) < sd_a(1.0)


class TestSummaries:
    def test_summary_fields(self, grid, ctx):
        fit = mle_fit(ctx)
        s = summarize(grid, ctx, default_prior(), mle=fit.theta)
        assert set(s.marginals) == {"a_fb", "b", "tau"}
        assert np.allclose(np.diag(s.corr), 1.0)
        assert np.all(np.abs(s.corr) <= 1.0 + 1e-12)
        assert all(x > 0 for x in s.sd)
        assert not s.degenerate
        # polish can only move the MAP up the posterior surface
        assert s.mle == fit.theta

    def test_productivity_correlation_positive_with_data(self, grid):
        s = summarize(grid)
        assert s.corr[0, 1] > 0.5

    def test_delta_posterior_degenerates_cleanly(self):
        g = delta_posterior(THETA)
        assert g.weights.sum() == 1.0
        s = summarize(g)
        assert s.degenerate
        assert s.mean == THETA
        assert s.map == THETA
        assert s.sd == (0.0, 0.0, 0.0)


class TestMle:
    def test_recovers_truth_on_large_catalog(self, ctx):
        fit = mle_fit(ctx)
        assert abs(fit.theta.a_fb - THETA.a_fb) <= 0.1
        assert abs(fit.theta.b - THETA.b) <= 0.1
        assert abs(fit.theta.tau - THETA.tau) / THETA.tau <= 0.2
        assert fit.at_bounds == (False, False, False)
        assert fit.tau_identified
        assert np.isfinite(fit.log_likelihood)

    def test_partial_mode_freezes_tau(self, sim_catalog, const_profile):
        cut = sim_catalog.truncated(15.0)
        c = LikelihoodContext(catalog=cut, profile=const_profile.without_shutin(),
                              mu=MU, mode="partial")
        fit = mle_fit(c, t_now=15.0)
        assert not fit.tau_identified
        assert abs(fit.theta.a_fb - THETA.a_fb) <= 0.1
        assert abs(fit.theta.b - THETA.b) <= 0.1

    def test_floor_magnitudes_pin_b_at_upper_bound(self, const_profile):
        # every magnitude at the completeness floor drives b-hat to the cap
        spec = SimulationSpec(theta=THETA, profile=const_profile,
                              mag=MagnitudeModel(b=THETA.b, m0=M0, mu=MU),
                              t_end=30.0, seed=31)
        cat = simulate(spec)
        floored = SeismicCatalog(cat.times, np.full_like(cat.times, M0),
                                 m0=M0, t_end=30.0)
        c = LikelihoodContext(catalog=floored, profile=const_profile, mu=MU)
        fit = mle_fit(c)
        assert fit.at_bounds[1]
        assert fit.theta.b == pytest.approx(2.5, abs=1e-5)

    def test_impossible_catalog_raises(self):
        prof = InjectionProfile.from_breakpoints(
            [(0.0, 0.0), (1.0, 600.0), (5.0, 0.0)], shut_in=5.0)
        cat = SeismicCatalog(np.array([0.4]), np.array([1.5]), m0=1.0,
                             t_end=9.0)
        c = LikelihoodContext(catalog=cat, profile=prof, mu=MU)
        with pytest.raises(FitFailureError):
            mle_fit(c)


class TestBayesAverage:
    def test_matches_naive_node_sum(self, grid, ctx):
        # same mixture, computed the slow way
        ts = [2.0, 10.0, 20.0, 24.0, 30.0]
        got = bayes_average_cumulative(grid, np.array(ts), ctx)
        a, b, tau = grid.axes
        for idx, t in enumerate(ts):
            want = 0.0
            for i in range(len(a)):
                for j in range(len(b)):
                    for k in range(len(tau)):
                        theta = RateParams(a[i], b[j], tau[k])
                        want += grid.weights[i, j, k] * cumulative_rate(
                            t, theta, ctx.profile, ctx.catalog.m0)
            assert got[idx] == pytest.approx(want, rel=1e-10)

    def test_monotone_in_time(self, grid, ctx):
        t = np.linspace(0.0, 30.0, 61)
        lam = bayes_average_cumulative(grid, t, ctx)
        assert np.all(np.diff(lam) >= 0.0)
        assert lam[0] == 0.0

    def test_mixture_export_reconstructs_exactly(self, grid, ctx):
        coeff = grid.productivity_mixture(ctx.catalog.m0)
        f = bayes_average_from_mixture(grid.tau_nodes, coeff, ctx.profile)
        t = np.array([1.0, 15.0, 21.0, 28.0])
        np.testing.assert_allclose(f(t), bayes_average_cumulative(grid, t, ctx),
                                   rtol=1e-12)


class TestExport:
    def test_posterior_dict_roundtrip(self, grid, ctx):
        import json
        s = summarize(grid)
        d = posterior_to_dict(grid, s, ctx.catalog.m0)
        json.dumps(d)
        assert set(d["marginals"]) == {"a_fb", "b", "tau"}
        assert len(d["axes"]["tau"]) == len(d["marginals"]["tau"])
        assert len(d["tau_mixture"]["coefficients"]) == len(d["axes"]["tau"])
        assert d["mean"]["b"] == pytest.approx(grid.mean().b)
