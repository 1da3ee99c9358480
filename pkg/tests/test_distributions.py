import numpy as np
import pytest
from scipy import integrate, stats

from censpred import BetaTypeII, DomainError, MultiParetoII, ParetoII
from censpred._random import make_rng
from censpred.distributions import beta2_cdf_shape2


class TestParetoII:
    @pytest.mark.parametrize("shape,rate,t,expected", [
        (1, 1, 0, 1.0),
        (20, 0.27941, 0, 20 * 0.27941),
        (2, 1, 1, 0.25),
    ])
    def test_pdf_values(self, shape, rate, t, expected):
        assert ParetoII(shape, rate).pdf(t) == pytest.approx(expected, rel=1e-14)

    def test_sf_values(self):
        assert ParetoII(3, 2).sf(0) == 1.0
        assert ParetoII(1, 1).sf(1) == pytest.approx(0.5)
        assert ParetoII(20, 10 / 35.79).sf(0.722) == pytest.approx(0.02532, abs=1e-4)

    def test_quantile(self):
        assert ParetoII(1, 1).quantile(0.5) == pytest.approx(1.0)
        assert ParetoII(20, 10 / 35.79).quantile(1 - 0.02532) == pytest.approx(0.722, abs=1e-3)

    def test_quantile_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            d = ParetoII(rng.uniform(0.3, 40), rng.uniform(0.01, 5))
            p = rng.uniform(0.001, 0.999)
            assert d.cdf(d.quantile(p)) == pytest.approx(p, abs=1e-12)
            t = d.quantile(rng.uniform(0.001, 0.99))
            assert d.quantile(d.cdf(t)) == pytest.approx(t, rel=1e-10)

    def test_pdf_integral_plus_tail_is_one(self):
        for shape, rate in [(0.7, 2.0), (3.0, 0.5), (20.0, 0.28)]:
            d = ParetoII(shape, rate)
            T = d.quantile(0.99999)
            cuts = np.concatenate([[0.0], np.geomspace(1e-6, T, 60)])
            val = sum(integrate.quad(d.pdf, a, b, epsabs=0, epsrel=1e-12)[0] for a, b in zip(cuts[:-1], cuts[1:]))
            assert val + d.sf(T) == pytest.approx(1.0, abs=1e-8)

    def test_mean(self):
        assert ParetoII(3, 2).mean() == pytest.approx(1 / (2 * 2))
        with pytest.raises(DomainError):
            ParetoII(1, 1).mean()

    @pytest.mark.parametrize("shape,rate", [(0, 1), (1, 0), (-1, 1)])
    def test_invalid_parameters(self, shape, rate):
        with pytest.raises(DomainError):
            ParetoII(shape, rate)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            ParetoII(1, 1).pdf(-0.1)


class TestMultiParetoII:
    h = (0.27941, 0.25147)

    def test_pdf_at_origin(self):
        assert MultiParetoII(1, (1.0,)).pdf([0.0]) == pytest.approx(1.0)
        assert MultiParetoII(20, self.h).pdf([0, 0]) == pytest.approx(20 * 21 * 0.27941 * 0.25147, rel=1e-13)

    def test_survival(self):
        d = MultiParetoII(20, self.h)
        assert d.survival([0, 0]) == 1.0
        assert d.survival([0.5, 0.5]) == pytest.approx((1 + 0.5 * sum(self.h)) ** -20, rel=1e-13)
        assert d.survival([0.5, 0.5]) == pytest.approx(0.00901, abs=1e-5)

    def test_normalization(self):
        d = MultiParetoII(3, (1.0, 2.0))
        val, _ = integrate.dblquad(lambda z2, z1: d.pdf([z1, z2]), 0, np.inf, 0, np.inf, epsabs=1e-10)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_survival_matches_integral(self):
        d = MultiParetoII(3, (1.0, 2.0))
        z = (0.3, 0.2)
        val, _ = integrate.dblquad(lambda b, a: d.pdf([a, b]), z[0], np.inf, z[1], np.inf, epsabs=1e-11)
        assert val == pytest.approx(d.survival(z), abs=1e-6)

    def test_marginal_by_integration(self):
        d = MultiParetoII(4.5, (0.7, 1.3))
        for z1 in (0.0, 0.4, 2.0):
            val, _ = integrate.quad(lambda z2: d.pdf([z1, z2]), 0, np.inf, epsabs=0, epsrel=1e-12)
            assert val == pytest.approx(d.marginal(0).pdf(z1), rel=1e-8)

    def test_conditional_values(self):
        c = MultiParetoII(1, (1.0, 1.0)).conditional(0, 1, 0.0)
        assert (c.shape, c.rate) == (2, 1)
        c = MultiParetoII(20, self.h).conditional(0, 1, 1.0)
        assert c.shape == 21
        assert c.rate == pytest.approx(0.25147 / 1.27941, rel=1e-14)

    def test_conditional_matches_slice_of_joint(self):
        d = MultiParetoII(20, self.h)
        norm, _ = integrate.quad(lambda t: d.pdf([1.0, t]), 0, np.inf, epsabs=0, epsrel=1e-12)
        c = d.conditional(0, 1, 1.0)
        for t in (0.0, 0.5, 3.0):
            assert d.pdf([1.0, t]) / norm == pytest.approx(c.pdf(t), rel=1e-9)

    def test_chain_rule(self):
        rng = np.random.default_rng(3)
        d = MultiParetoII(6.2, (0.4, 1.7, 0.9))
        for _ in range(20):
            z = rng.uniform(0, 3, size=3)
            joint2 = MultiParetoII(6.2, (0.4, 1.7))
            lhs = joint2.pdf(z[:2])
            rhs = d.marginal(0).pdf(z[0]) * d.conditional(0, 1, z[0]).pdf(z[1])
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_scaling_property(self):
        rng = np.random.default_rng(4)
        h = np.array([0.3, 2.5])
        d = MultiParetoII(7, tuple(h))
        unit = MultiParetoII(7, (1.0, 1.0))
        for _ in range(20):
            z = rng.uniform(0, 2, size=2)
            assert unit.pdf(h * z) * h.prod() == pytest.approx(d.pdf(z), rel=1e-12)

    def test_degenerate_one_dimensional(self):
        d = MultiParetoII(3.3, (0.8,))
        p = ParetoII(3.3, 0.8)
        for t in (0.0, 0.5, 4.0):
            assert d.pdf([t]) == pytest.approx(p.pdf(t), rel=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            MultiParetoII(2, (1.0, 1.0)).pdf([1.0, 2.0, 3.0])

    def test_sample_marginal_survival(self):
        d = MultiParetoII(3, (1.0, 2.0))
        z = d.sample(make_rng(11), 100_000)
        for i, t in [(0, 0.2), (0, 1.0), (1, 0.3)]:
            emp = np.mean(z[:, i] >= t)
            p = d.marginal(i).sf(t)
            assert abs(emp - p) < 3 * np.sqrt(p * (1 - p) / len(z))

    def test_sample_correlation(self):
        m = 5
        z = MultiParetoII(m, (1.0, 3.0)).sample(make_rng(12), 100_000)
        rho = np.corrcoef(z[:, 0], z[:, 1])[0, 1]
        # heavy tails: m = 5 keeps fourth moments finite, bootstrap the stderr
        rng = np.random.default_rng(0)
        boots = []
        for _ in range(50):
            idx = rng.integers(0, len(z), len(z))
            boots.append(np.corrcoef(z[idx, 0], z[idx, 1])[0, 1])
        assert abs(rho - 1 / m) < 3 * np.std(boots)

    def test_linear_statistic_is_beta2(self):
        h = np.array([0.6, 1.4])
        d = MultiParetoII(4, tuple(h))
        w = d.sample(make_rng(13), 100_000) @ h
        res = stats.kstest(w, BetaTypeII(2, 4).cdf)
        assert res.statistic < stats.kstwo.ppf(0.997, len(w))

    def test_conditional_mean_regression(self):
        m, h = 6, (1.0, 2.0)
        z = MultiParetoII(m, h).sample(make_rng(14), 400_000)
        sel = (z[:, 0] > 0.45) & (z[:, 0] < 0.55)
        est = z[sel, 1].mean()
        se = z[sel, 1].std(ddof=1) / np.sqrt(sel.sum())
        expected = np.mean((1 + h[0] * z[sel, 0]) / (h[1] * m))
        assert abs(est - expected) < 4 * se

    def test_sample_determinism(self):
        d = MultiParetoII(3, (1.0, 2.0))
        a = d.sample(make_rng(5), 1000)
        b = d.sample(make_rng(5), 1000)
        assert a.tobytes() == b.tobytes()


class TestBetaTypeII:
    def test_cdf_at_zero(self):
        assert BetaTypeII(2, 20).cdf(0.0) == 0.0

    def test_murthy_quantile(self):
        assert BetaTypeII(2, 20).cdf(0.2606) == pytest.approx(0.95, abs=5e-4)
        assert BetaTypeII(2, 20).quantile(0.95) == pytest.approx(0.2606, abs=5e-4)

    def test_median_of_b2_1_1(self):
        assert BetaTypeII(1, 1).quantile(0.5) == pytest.approx(1.0, rel=1e-12)

    def test_shape_two_closed_form(self):
        c = np.linspace(0, 2, 100)
        np.testing.assert_allclose(BetaTypeII(2, 21).cdf(c), beta2_cdf_shape2(21, c), rtol=0, atol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            d = BetaTypeII(rng.integers(1, 6), rng.uniform(0.5, 40))
            p = rng.uniform(0.01, 0.99)
            assert d.cdf(d.quantile(p)) == pytest.approx(p, abs=1e-10)

    def test_matches_scipy_betaprime(self):
        c = np.array([0.01, 0.3, 2.0, 9.0])
        np.testing.assert_allclose(BetaTypeII(3, 4.5).cdf(c), stats.betaprime(3, 4.5).cdf(c), rtol=1e-12)
        np.testing.assert_allclose(BetaTypeII(3, 4.5).pdf(c), stats.betaprime(3, 4.5).pdf(c), rtol=1e-12)

    def test_invalid_probability(self):
        with pytest.raises(DomainError):
            BetaTypeII(2, 2).quantile(1.0)
