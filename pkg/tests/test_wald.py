"""Closed-form first-passage law against quadrature and Monte-Carlo oracles."""

import numpy as np
import pytest
from scipy.integrate import quad

from saclat import wald
from saclat.wald import IGParams

PARAM_SET = [IGParams(1.0, 1.0), IGParams(2.0, 4.0), IGParams(3.0, 3.5)]


def integrate_pdf(p, lo, hi):
    """Adaptive-quadrature oracle for the pdf mass on [lo, hi]."""
    val, err = quad(lambda t: wald.pdf(t, p), lo, hi, limit=400, epsabs=1e-12, epsrel=1e-12)
    assert err < 1e-9
    return val


class TestPdf:
    def test_unit_point(self):
        # exponent vanishes at t=1 for alpha=nu=1
        assert wald.pdf(1.0, IGParams(1.0, 1.0)) == pytest.approx(0.3989422804014327, abs=1e-15)

    def test_no_mass_at_or_below_zero(self):
        p = IGParams(2.0, 1.5)
        assert wald.pdf(-0.5, p) == 0.0
        assert wald.pdf(0.0, p) == 0.0
        arr = wald.pdf(np.array([-1.0, 0.0, 0.5]), p)
        assert arr[0] == 0.0 and arr[1] == 0.0 and arr[2] > 0.0

    def test_total_mass_by_quadrature(self):
        p = IGParams(3.0, 3.5)
        hi = 200.0 * wald.mean(p)
        mode_split = wald.mean(p)
        total = integrate_pdf(p, 0.0, mode_split) + integrate_pdf(p, mode_split, hi)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_nonnegative_everywhere(self):
        p = IGParams(2.0, 4.0)
        t = np.linspace(-1.0, 10.0, 500)
        assert np.all(wald.pdf(t, p) >= 0.0)

    def test_rejects_non_finite(self):
        p = IGParams(1.0, 1.0)
        with pytest.raises(ValueError):
            wald.pdf(np.nan, p)
        with pytest.raises(ValueError):
            wald.pdf(np.inf, p)


class TestSurvival:
    def test_at_zero(self):
        assert wald.survival(0.0, IGParams(1.0, 1.0)) == 1.0

    def test_matches_quadrature_tail(self):
        p = IGParams(1.0, 1.0)
        t = 10.0 * wald.mean(p)
        tail = 1.0 - (integrate_pdf(p, 0.0, wald.mean(p)) + integrate_pdf(p, wald.mean(p), t))
        assert wald.survival(t, p) == pytest.approx(tail, abs=1e-8)

    def test_matches_quadrature_at_fixed_point(self):
        p = IGParams(3.56, 3.0)
        mass = integrate_pdf(p, 0.0, 1.0) + integrate_pdf(p, 1.0, 2.0)
        assert wald.survival(2.0, p) == pytest.approx(1.0 - mass, abs=1e-8)

    def test_monotone_and_bounded(self):
        p = IGParams(3.0, 3.5)
        t = np.linspace(0.0, 20.0 * wald.mean(p), 800)
        s = wald.survival(t, p)
        assert np.all(np.diff(s) <= 1e-15)
        assert np.all((s >= 0.0) & (s <= 1.0))

    def test_no_overflow_for_large_alpha_nu(self):
        # naive exp(2*nu*alpha) would be exp(20000) here
        p = IGParams(100.0, 100.0)
        s = wald.survival(np.array([0.5, 1.0, 2.0]), p)
        assert np.all(np.isfinite(s)) and np.all((s >= 0.0) & (s <= 1.0))

    def test_negative_t_rejected(self):
        with pytest.raises(ValueError):
            wald.survival(-0.1, IGParams(1.0, 1.0))


class TestCdf:
    def test_zero_at_origin(self):
        assert wald.cdf(0.0, IGParams(2.0, 4.0)) == 0.0

    def test_total_mass_at_large_t(self):
        p = IGParams(2.0, 4.0)
        assert wald.cdf(50.0 * wald.mean(p), p) == pytest.approx(1.0, abs=1e-9)

    def test_median_self_consistency(self):
        p = IGParams(3.0, 3.5)
        median = wald.quantile(0.5, p)
        assert wald.cdf(median, p) == pytest.approx(0.5, abs=1e-10)

    def test_complements_survival(self):
        p = IGParams(1.0, 1.0)
        t = np.linspace(0.01, 10.0, 50)
        assert np.allclose(wald.cdf(t, p) + wald.survival(t, p), 1.0, atol=1e-12)

    def test_derivative_matches_pdf(self):
        # d/dt cdf = pdf by central differences, away from t=0. Difference
        # whichever of cdf/survival is small there; the saturated one cancels.
        p = IGParams(2.0, 4.0)
        for t in np.linspace(0.1, 3.0, 25):
            h = 1e-6 * max(t, 1.0)
            if wald.cdf(t, p) < 0.5:
                fd = (wald.cdf(t + h, p) - wald.cdf(t - h, p)) / (2.0 * h)
            else:
                fd = -(wald.survival(t + h, p) - wald.survival(t - h, p)) / (2.0 * h)
            assert fd == pytest.approx(wald.pdf(t, p), rel=1e-5)


class TestMoments:
    def test_formulas(self):
        assert wald.mean(IGParams(2.0, 4.0)) == 0.5
        assert wald.variance(IGParams(1.0, 1.0)) == 1.0

    @pytest.mark.parametrize("p", PARAM_SET)
    def test_against_quadrature_moments(self, p):
        hi = 200.0 * wald.mean(p)
        m1, _ = quad(lambda t: t * wald.pdf(t, p), 0, hi, limit=400, epsabs=1e-13)
        m2, _ = quad(lambda t: t * t * wald.pdf(t, p), 0, hi, limit=400, epsabs=1e-13)
        assert m1 == pytest.approx(wald.mean(p), rel=1e-6)
        assert m2 - m1**2 == pytest.approx(wald.variance(p), rel=1e-6)

    @pytest.mark.parametrize("p", PARAM_SET)
    def test_threshold_identity(self, p):
        # sqrt(mean^3 / variance) recovers alpha exactly in closed form
        assert np.sqrt(wald.mean(p) ** 3 / wald.variance(p)) == pytest.approx(
            p.alpha, rel=1e-14
        )

    def test_monte_carlo_mean(self):
        p = IGParams(3.0, 3.5)
        rng = np.random.default_rng(7)
        draws = wald.sample(p, rng, size=10**6)
        assert draws.mean() == pytest.approx(wald.mean(p), rel=0.01)


class TestSample:
    def test_deterministic_given_seed(self):
        p = IGParams(2.0, 4.0)
        a = wald.sample(p, np.random.default_rng(123), size=1000)
        b = wald.sample(p, np.random.default_rng(123), size=1000)
        assert np.array_equal(a, b)

    def test_ks_against_own_cdf(self):
        from saclat.stats import ks_one_sample

        p = IGParams(1.0, 1.0)
        draws = wald.sample(p, np.random.default_rng(21), size=10**5)
        _, pval = ks_one_sample(draws, lambda t: wald.cdf(t, p))
        assert pval > 0.01

    def test_monte_carlo_variance(self):
        p = IGParams(2.0, 4.0)
        draws = wald.sample(p, np.random.default_rng(5), size=10**6)
        assert draws.var(ddof=1) == pytest.approx(wald.variance(p), rel=0.03)

    def test_all_positive(self):
        p = IGParams(1.0, 1.0)
        draws = wald.sample(p, np.random.default_rng(2), size=10000)
        assert np.all(draws > 0.0)


class TestJointDensity:
    def test_zero_at_absorbing_boundary(self):
        p = IGParams(1.3, 0.8)
        for t in (0.1, 0.5, 2.0):
            assert wald.fp_joint_density(t, p.alpha, p) == pytest.approx(0.0, abs=1e-15)

    def test_integrates_to_survival(self):
        p = IGParams(1.0, 1.0)
        t = 0.5
        val, err = quad(
            lambda a: wald.fp_joint_density(t, a, p), -np.inf, p.alpha, limit=400
        )
        assert err < 1e-8
        assert val == pytest.approx(wald.survival(t, p), abs=1e-6)

    def test_driftless_limit_matches_reflection_formula(self):
        # with nu ~ 0 the image term loses its exponential tilt
        p = IGParams(1.5, 1e-12)
        for t, a in [(0.3, 0.2), (1.0, -0.5), (2.0, 1.4)]:
            expected = (
                np.exp(-(a**2) / (2 * t)) - np.exp(-((a - 2 * p.alpha) ** 2) / (2 * t))
            ) / np.sqrt(2 * np.pi * t)
            assert wald.fp_joint_density(t, a, p) == pytest.approx(expected, rel=1e-9)

    def test_rejects_a_above_threshold(self):
        with pytest.raises(ValueError):
            wald.fp_joint_density(1.0, 1.1, IGParams(1.0, 1.0))

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError):
            wald.fp_joint_density(0.0, 0.5, IGParams(1.0, 1.0))


class TestParams:
    def test_invalid_rejected(self):
        for alpha, nu in [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0), (np.nan, 1.0)]:
            with pytest.raises(ValueError):
                IGParams(alpha, nu)

    def test_mu_lambda_round_trip(self):
        p = IGParams(3.0, 3.5)
        mu, lam = wald.to_mu_lambda(p)
        assert (mu, lam) == (p.alpha / p.nu, p.alpha**2)
        back = wald.from_mu_lambda(mu, lam)
        assert back.alpha == pytest.approx(p.alpha, rel=1e-15)
        assert back.nu == pytest.approx(p.nu, rel=1e-15)


class TestQuantile:
    def test_monotone_in_level(self):
        p = IGParams(2.0, 4.0)
        qs = [wald.quantile(q, p) for q in (0.1, 0.25, 0.5, 0.75, 0.9)]
        assert all(a < b for a, b in zip(qs, qs[1:]))

    def test_level_bounds(self):
        with pytest.raises(ValueError):
            wald.quantile(0.0, IGParams(1.0, 1.0))
        with pytest.raises(ValueError):
            wald.quantile(1.0, IGParams(1.0, 1.0))
