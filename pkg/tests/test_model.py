import math

import numpy as np
import pytest
from scipy import integrate, stats

from censpred import CensoredSample, DomainError, murthy_lifetimes, simulate_experiment, sufficient_statistic
from censpred._random import make_rng
from censpred.model import (
    NextNTarget,
    PairTarget,
    model_density_next_n,
    model_density_pair,
    model_spacing_rates,
    simulate_experiments,
    sufficient_statistics,
)

from oracles import next_n_model_density, pair_model_density


class TestSample:
    def test_murthy_statistic(self, murthy):
        assert sufficient_statistic(murthy) == pytest.approx(35.79, abs=1e-10)
        assert murthy.last == 1.74

    def test_murthy_has_ties(self):
        values = murthy_lifetimes()
        assert len(values) == 30
        assert values.count(1.23) == 2

    def test_small_case(self):
        assert sufficient_statistic(CensoredSample(2, 1, (1.0,))) == 2.0

    def test_scale_equivariance(self, murthy):
        c = 3.5
        scaled = CensoredSample(30, 20, tuple(c * v for v in murthy.values))
        assert sufficient_statistic(scaled) == pytest.approx(c * sufficient_statistic(murthy), rel=1e-15)

    def test_permutation_invariance_through_sorting(self):
        values = [0.4, 0.1, 0.9, 0.3]
        a = sufficient_statistic(CensoredSample(6, 4, tuple(sorted(values))))
        rng = np.random.default_rng(0)
        b = sufficient_statistic(CensoredSample(6, 4, tuple(sorted(rng.permutation(values)))))
        assert a == b

    @pytest.mark.parametrize("n,m,values", [
        (5, 2, (0.2, 0.1)),        # unsorted
        (5, 2, (0.1,)),            # wrong length
        (5, 5, (1, 2, 3, 4, 5)),   # m = n
        (5, 0, ()),                # m = 0
        (5, 2, (0.0, 0.1)),        # zero lifetime
        (5, 2, (-1.0, 0.1)),
    ])
    def test_validation(self, n, m, values):
        with pytest.raises(DomainError):
            CensoredSample(n, m, values)


class TestTargets:
    def test_pair_validation(self):
        PairTarget(21, 30).validate(30, 20)
        for r, s in [(20, 30), (21, 21), (21, 31), (25, 22)]:
            with pytest.raises(DomainError):
                PairTarget(r, s).validate(30, 20)

    def test_next_validation(self):
        NextNTarget(10).validate(30, 20)
        with pytest.raises(DomainError):
            NextNTarget(11).validate(30, 20)
        with pytest.raises(DomainError):
            NextNTarget(0).validate(30, 20)

    def test_spacing_rates(self):
        assert model_spacing_rates(30, 20, 2).tolist() == [10, 9]
        assert model_spacing_rates(5, 4, 1).tolist() == [1]
        with pytest.raises(DomainError):
            model_spacing_rates(30, 20, 11)


class TestModelDensities:
    def test_pair_matches_hypoexponential(self):
        rng = np.random.default_rng(1)
        for n, m, r, s in [(5, 2, 3, 5), (6, 2, 4, 6), (7, 1, 4, 5), (8, 3, 5, 8)]:
            theta = rng.uniform(0.3, 3)
            for _ in range(10):
                y = rng.uniform(0.01, 2, size=2)
                assert model_density_pair(n, m, r, s, theta, y) == pytest.approx(
                    pair_model_density(n, m, r, s, theta, *y), rel=1e-9)

    def test_next_n_matches_product(self):
        z = [0.3, 0.1, 0.7]
        assert model_density_next_n(9, 4, 3, 1.7, z) == pytest.approx(next_n_model_density(9, 4, 3, 1.7, z), rel=1e-13)

    @pytest.mark.parametrize("n,m,r,s,theta", [
        (5, 2, 3, 5, 1.0),
        (5, 2, 3, 4, 1.0),   # r = m + 1 and s = r + 1
        (6, 2, 4, 6, 0.7),
        (6, 3, 4, 5, 2.0),
        (7, 1, 2, 7, 1.3),
    ])
    def test_pair_normalization(self, n, m, r, s, theta):
        val, _ = integrate.dblquad(lambda y2, y1: model_density_pair(n, m, r, s, theta, [y1, y2]),
                                   0, np.inf, 0, np.inf, epsabs=1e-11)
        assert val == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("n,m,r,s", [(6, 2, 4, 6), (6, 2, 3, 5), (9, 3, 6, 8)])
    def test_y1_marginal_beta_representation(self, n, m, r, s):
        theta = 1.4
        for y1 in (0.05, 0.3, 1.1):
            marg, _ = integrate.quad(lambda y2: model_density_pair(n, m, r, s, theta, [y1, y2]),
                                     0, np.inf, epsabs=0, epsrel=1e-12)
            u = math.exp(-theta * y1)
            beta_density = theta * u * stats.beta(n - r + 1, r - m).pdf(u)
            assert marg == pytest.approx(beta_density, rel=1e-8)

    def test_beta_representation_by_simulation(self):
        n, m, r, theta = 12, 4, 7, 0.8
        obs, fut = simulate_experiments(n, m, theta, make_rng(3), 100_000)
        y1 = fut[:, r - m - 1] - obs[:, -1]
        res = stats.kstest(np.exp(-theta * y1), stats.beta(n - r + 1, r - m).cdf)
        assert res.statistic < stats.kstwo.ppf(0.997, len(y1))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            model_density_pair(5, 2, 3, 5, 1.0, [-0.1, 0.2])
        with pytest.raises(DomainError):
            model_density_pair(5, 2, 3, 5, 0.0, [0.1, 0.2])
        with pytest.raises(DomainError):
            model_density_next_n(5, 2, 2, -1.0, [0.1, 0.2])


@pytest.fixture(scope="module")
def draws():
    return simulate_experiments(TestSimulation.n, TestSimulation.m, TestSimulation.theta, make_rng(7), 100_000)


class TestSimulation:
    n, m, theta = 30, 20, 1.5

    def test_sufficient_statistic_mean(self, draws):
        x = sufficient_statistics(draws[0], self.n)
        se = x.std(ddof=1) / math.sqrt(len(x))
        assert abs(x.mean() - self.m / self.theta) < 3 * se

    def test_first_spacing_is_exponential(self, draws):
        z1 = draws[1][:, 0] - draws[0][:, -1]
        res = stats.kstest(z1, stats.expon(scale=1 / ((self.n - self.m) * self.theta)).cdf)
        assert res.statistic < stats.kstwo.ppf(0.997, len(z1))

    def test_statistic_independent_of_spacing(self, draws):
        x = sufficient_statistics(draws[0], self.n)
        z1 = draws[1][:, 0] - draws[0][:, -1]
        rho = np.corrcoef(x, z1)[0, 1]
        assert abs(rho) < 3 / math.sqrt(len(x))

    def test_single_experiment(self):
        sample, future = simulate_experiment(10, 4, 2.0, make_rng(1))
        assert isinstance(sample, CensoredSample)
        assert len(future) == 6
        assert future[0] >= sample.last
        assert np.all(np.diff(future) >= 0)

    def test_determinism(self):
        a = simulate_experiments(10, 4, 2.0, make_rng(9), 100)
        b = simulate_experiments(10, 4, 2.0, make_rng(9), 100)
        assert a[0].tobytes() == b[0].tobytes() and a[1].tobytes() == b[1].tobytes()
