"""Estimators against closed forms and synthetic fixtures."""

import numpy as np
import pytest

from trawlkit import (
    empirical_charfn,
    ks_statistic,
    partial_sum_variance,
    sample_autocovariance,
    sample_autocovariance_curve,
    scaling_exponent_fit,
    tail_ratio,
)


class TestSampleAutocovariance:
    def test_constant_path(self):
        path = np.full(500, 3.7)
        for k in range(5):
            assert sample_autocovariance(path, k) == pytest.approx(0.0, abs=1e-12)

    def test_iid_normal_lag0(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(100_000)
        se = np.sqrt(2.0 / x.size)
        assert abs(sample_autocovariance(x, 0) - 1.0) <= 4 * se

    def test_lag0_nonnegative_and_reversal_invariant(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            x = rng.standard_normal(rng.integers(5, 200))
            v = sample_autocovariance(x, 0)
            assert v >= 0.0
            assert sample_autocovariance(x[::-1], 0) == pytest.approx(v, rel=1e-12)

    def test_known_mean_matches_manual(self):
        x = np.array([1.0, 2.0, 0.5, 3.0, 1.5])
        m = 1.2
        k = 2
        manual = np.sum((x[:-k] - m) * (x[k:] - m)) / x.size
        assert sample_autocovariance(x, k, mean=m) == pytest.approx(manual, rel=1e-12)

    def test_curve_matches_single_lag(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(4096)
        curve = sample_autocovariance_curve(x, 20)
        for k in (0, 1, 7, 20):
            assert curve[k] == pytest.approx(sample_autocovariance(x, k), abs=1e-10)

    def test_lag_out_of_range(self):
        with pytest.raises(ValueError):
            sample_autocovariance(np.ones(10), 10)


class TestPartialSumVariance:
    def test_zero_paths(self):
        out = partial_sum_variance(np.zeros((5, 100)), [10, 50, 100])
        assert all(v == 0.0 for _, v in out)

    def test_iid_normal_linear_growth(self):
        rng = np.random.default_rng(4)
        paths = rng.standard_normal((1000, 512))
        for n, v in partial_sum_variance(paths, [64, 128, 512]):
            assert abs(v / n - 1.0) <= 0.10

    def test_single_replica_rejected(self):
        with pytest.raises(ValueError):
            partial_sum_variance(np.ones((1, 10)), [5])

    def test_grid_bound(self):
        with pytest.raises(ValueError):
            partial_sum_variance(np.ones((3, 10)), [11])


class TestScalingFit:
    def test_exact_square(self):
        ns = [2, 4, 8, 16, 32]
        slope, _, r2 = scaling_exponent_fit([(n, n**2) for n in ns])
        assert slope == pytest.approx(2.0, rel=1e-12)
        assert r2 == pytest.approx(1.0)

    def test_exact_three_halves(self):
        slope, _, _ = scaling_exponent_fit([(n, 3.7 * n**1.5) for n in (10, 100, 1000)])
        assert slope == pytest.approx(1.5, rel=1e-12)

    def test_noisy_fixture(self):
        rng = np.random.default_rng(5)
        ns = np.array([2**e for e in range(7, 14)])
        vs = ns**1.5 * (1.0 + rng.uniform(-0.01, 0.01, ns.size))
        slope, _, _ = scaling_exponent_fit(list(zip(ns, vs)))
        assert 1.48 <= slope <= 1.52

    def test_positivity_required(self):
        with pytest.raises(ValueError):
            scaling_exponent_fit([(1, 1.0), (2, -1.0), (3, 1.0)])
        with pytest.raises(ValueError):
            scaling_exponent_fit([(1, 1.0), (2, 2.0)])


class TestEmpiricalCharfn:
    def test_zeros(self):
        vals = empirical_charfn(np.zeros(100), [0.3, 1.0, 2.0])
        assert np.allclose(vals, 1.0)

    def test_gaussian_reference(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(200_000)
        val = empirical_charfn(x, [1.0])[0]
        assert abs(val - np.exp(-0.5)) <= 4.0 / np.sqrt(x.size)

    def test_degenerate_point_mass(self):
        c = 1.7
        for z in (0.5, 2.0):
            val = empirical_charfn(np.full(50, c), [z])[0]
            assert val == pytest.approx(np.exp(1j * z * c), rel=1e-12)

    def test_modulus_never_exceeds_one(self):
        rng = np.random.default_rng(7)
        x = rng.pareto(1.2, 5000)
        vals = empirical_charfn(x, np.linspace(-3, 3, 25))
        assert np.all(np.abs(vals) <= 1.0 + 1e-12)


class TestKsStatistic:
    def test_null_distribution_quantile(self):
        # sqrt(m) * D under the null: 95% quantile near 1.358
        rng = np.random.default_rng(8)
        m = 400
        stats = np.array(
            [ks_statistic(rng.random(m), lambda x: np.clip(x, 0, 1)) for _ in range(800)]
        )
        q95 = np.quantile(np.sqrt(m) * stats, 0.95)
        assert 1.22 <= q95 <= 1.50

    def test_samples_outside_support(self):
        cdf = lambda x: np.where(x < 10.0, 0.0, 1.0)
        stat = ks_statistic(np.linspace(0, 1, 50), cdf)
        assert stat == pytest.approx(1.0)

    def test_against_own_ecdf(self):
        rng = np.random.default_rng(9)
        x = np.sort(rng.standard_normal(500))

        def ecdf(v):
            return np.searchsorted(x, v, side="right") / x.size

        assert ks_statistic(x, ecdf) <= 1.0 / x.size + 1e-12

    def test_range(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            stat = ks_statistic(rng.standard_normal(100), lambda v: np.clip(v, 0, 1))
            assert 0.0 <= stat <= 1.0


class TestTailRatio:
    def test_exact_pareto(self):
        # inverse-CDF fixture: P(X > y) = c0 y^-alpha beyond the scale point
        rng = np.random.default_rng(11)
        alpha, c0 = 1.5, 2.0
        u = rng.random(2_000_000)
        x = (c0 / u) ** (1.0 / alpha)
        ys = np.array([5.0, 10.0, 20.0, 40.0])
        for y, ratio in tail_ratio(x, alpha, ys):
            se = y**alpha * np.sqrt(c0 * y**-alpha / x.size)
            assert abs(ratio - c0) <= 4 * se + 1e-9

    def test_all_below_grid(self):
        out = tail_ratio(np.ones(100), 1.5, [10.0, 20.0])
        assert all(r == 0.0 for _, r in out)

    def test_scaling_covariance(self):
        rng = np.random.default_rng(12)
        z = rng.pareto(1.5, 10_000) + 1.0
        lam, alpha, y = 2.5, 1.5, 3.0
        scaled = tail_ratio(lam * z, alpha, [y])[0][1]
        base = tail_ratio(z, alpha, [y / lam])[0][1]
        assert scaled == pytest.approx(lam**alpha * base, rel=1e-12)

    def test_positive_grid_required(self):
        with pytest.raises(ValueError):
            tail_ratio(np.ones(10), 1.5, [0.0])
