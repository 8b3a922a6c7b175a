"""Analytic quantities against brute-force oracles and frozen values."""

import math

import numpy as np
import pytest

from trawlkit import (
    DivergentSeriesError,
    MixingLaw,
    SeedModel,
    TrawlSequence,
    asymptotic_constants,
    fbm_covariance,
    seed_covariance,
    sigma_squared,
    stable_charfn,
    theory_report,
    trawl_autocovariance,
    trawl_mean,
)

POISSON = SeedModel("poisson")
BM = SeedModel("bm")
PL = TrawlSequence("power-law", c0=1.0, alpha=1.5)
GEO = TrawlSequence("geometric", a=0.5)


def brute_autocov(seed, t, k, terms=1_000_000):
    """Direct summation oracle: sum_j rho(a_j, a_{j+k}) over j < terms."""
    if t.kind == "custom":
        terms = len(t.values)
    head = t.head(terms + k)
    js = np.arange(terms)
    lo = np.minimum(head[js], head[js + k])
    if seed.kind in ("bm", "poisson"):
        total = lo.sum()
    elif seed.kind == "bernoulli":
        total = (lo - head[js] * head[js + k]).sum()
    elif seed.kind == "mixed-poisson":
        mx = seed.mixing
        total = (mx.mean * lo + mx.variance * head[js] * head[js + k]).sum()
    elif seed.kind == "line":
        total = (seed.sigma_xi2 * head[js] * head[js + k]).sum()
    elif seed.kind == "gbm":
        total = np.expm1(lo).sum()
    else:
        total = sum(seed_covariance(seed, head[j], head[j + k]) for j in range(terms))
    # certified slack for the untouched tail (monotone trawls)
    if t.kind == "power-law":
        tail = 2.0 * t.c0 * (terms + k) ** (1 - t.alpha) / (t.alpha - 1)
    elif t.kind == "geometric":
        tail = 2.0 * t.a ** (terms + k) / (1 - t.a)
    else:
        tail = 0.0
    return float(total), float(tail)


class TestMean:
    def test_centered_seeds(self):
        for seed in (BM, SeedModel("line"), SeedModel("gbm")):
            assert trawl_mean(seed, PL) == 0.0

    def test_poisson_geometric(self):
        brute = sum(0.5**j for j in range(120))
        assert trawl_mean(POISSON, GEO) == pytest.approx(brute, rel=1e-12)
        assert trawl_mean(POISSON, GEO) == pytest.approx(2.0)

    def test_poisson_power_law_vs_partial_sums(self):
        # numeric series with integral tail bound as the oracle
        head = PL.head(2_000_000)
        partial = float(head.sum())
        tail_hi = (2e6) ** (1 - 1.5) / 0.5
        val = trawl_mean(POISSON, PL)
        assert partial <= val <= partial + tail_hi
        assert val == pytest.approx(2.612375, abs=1e-6)


class TestAutocovariance:
    def test_brownian_geometric_closed_form(self):
        assert trawl_autocovariance(BM, GEO, 2) == pytest.approx(0.5, rel=1e-12)

    def test_zero_trawl(self):
        zero = TrawlSequence("custom", values=(0.0,))
        assert trawl_autocovariance(POISSON, zero, 3) == 0.0

    def test_poisson_power_law_lag0(self):
        assert trawl_autocovariance(POISSON, PL, 0) == pytest.approx(2.612375, abs=1e-6)

    def test_negative_lag_rejected(self):
        with pytest.raises(ValueError):
            trawl_autocovariance(POISSON, PL, -1)

    @pytest.mark.parametrize("k", [0, 1, 2, 5, 20])
    @pytest.mark.parametrize(
        "seed",
        [
            POISSON,
            BM,
            SeedModel("bernoulli"),
            SeedModel("mixed-poisson", mixing=MixingLaw("exponential", rate=2.0)),
            SeedModel("line", sigma_xi2=1.5),
            SeedModel("gbm"),
        ],
        ids=lambda s: s.kind,
    )
    @pytest.mark.parametrize("trawl", [PL, GEO], ids=["power-law", "geometric"])
    def test_oracle_agreement(self, seed, trawl, k):
        # 60 (seed, trawl, k) combinations against capped direct summation
        if seed.kind == "bernoulli" and trawl.kind == "power-law":
            trawl = TrawlSequence("power-law", c0=0.9, alpha=1.5)  # keep a_0 <= 1
        tol = 1e-10
        got = trawl_autocovariance(seed, trawl, k, tol)
        brute, slack = brute_autocov(seed, trawl, k, terms=300_000)
        assert abs(got - brute) <= slack + 2 * tol, (seed.kind, trawl.kind, k)

    def test_long_memory_decay_window(self):
        c1, _, _ = asymptotic_constants(1.0, 1.5)
        ks = np.array([200, 500, 1000, 2000])
        for k in ks:
            scaled = k**0.5 * trawl_autocovariance(POISSON, PL, int(k))
            assert 0.9 * c1 <= scaled <= 1.1 * c1

    def test_variance_growth_matches_c2(self):
        # n * sum_{|k|<n} (1-|k|/n) gamma(k) / n^{3-alpha} -> c2 within 10% at n=1e4
        n = 10_000
        _, c2, _ = asymptotic_constants(1.0, 1.5)
        gam = np.array([trawl_autocovariance(POISSON, PL, k) for k in range(n)])
        weights = 1.0 - np.arange(n) / n
        var_sn = n * (gam[0] + 2.0 * float((weights[1:] * gam[1:]).sum()))
        assert abs(var_sn / n**1.5 - c2) <= 0.10 * c2

    def test_short_memory_variance_rate(self):
        n = 10_000
        s2 = sigma_squared(BM, GEO)
        gam = np.array([trawl_autocovariance(BM, GEO, k) for k in range(80)])
        weights = 1.0 - np.arange(80) / n
        var_sn = n * (gam[0] + 2.0 * float((weights[1:] * gam[1:]).sum()))
        assert abs(var_sn / n - s2) <= 0.01 * s2


class TestAsymptoticConstants:
    def test_reference_values(self):
        c1, c2, hurst = asymptotic_constants(1.0, 1.5)
        assert c1 == pytest.approx(2.0)
        assert c2 == pytest.approx(16.0 / 3.0)
        assert hurst == pytest.approx(0.75)

    def test_linear_in_c0(self):
        c1, c2, hurst = asymptotic_constants(2.0, 1.5)
        assert c1 == pytest.approx(4.0)
        assert c2 == pytest.approx(32.0 / 3.0)
        assert hurst == pytest.approx(0.75)

    def test_alpha_range_enforced(self):
        with pytest.raises(ValueError):
            asymptotic_constants(1.0, 2.5)
        with pytest.raises(ValueError):
            asymptotic_constants(1.0, 1.0)

    def test_boundary_warning(self):
        with pytest.warns(RuntimeWarning):
            asymptotic_constants(1.0, 1.99)

    def test_hurst_in_range(self):
        for alpha in (1.1, 1.5, 1.9):
            _, _, hurst = asymptotic_constants(1.0, alpha)
            assert 0.5 < hurst < 1.0
            assert hurst == pytest.approx((3 - alpha) / 2)


class TestSigmaSquared:
    def brute(self, seed, t, lags=200):
        total = trawl_autocovariance(seed, t, 0)
        for k in range(1, lags):
            total += 2 * trawl_autocovariance(seed, t, k)
        return total

    def test_brownian_geometric(self):
        val = sigma_squared(BM, GEO)
        assert val == pytest.approx(self.brute(BM, GEO), rel=1e-9)
        assert val == pytest.approx(6.0)

    def test_poisson_geometric_same_rho(self):
        assert sigma_squared(POISSON, GEO) == pytest.approx(6.0)

    def test_zero_trawl(self):
        zero = TrawlSequence("custom", values=(0.0,))
        assert sigma_squared(POISSON, zero) == 0.0

    def test_long_memory_rejected(self):
        with pytest.raises(DivergentSeriesError):
            sigma_squared(POISSON, PL)


class TestFbmCovariance:
    def test_variance_is_power_law(self):
        for hurst, t in ((0.75, 1.0), (0.75, 2.0), (0.6, 3.5)):
            assert fbm_covariance(hurst, t, t) == pytest.approx(t ** (2 * hurst))

    def test_half_is_brownian(self):
        assert fbm_covariance(0.5, 0.7, 1.3) == pytest.approx(0.7)

    def test_reference_value(self):
        assert fbm_covariance(0.75, 1.0, 2.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            fbm_covariance(1.2, 1.0, 1.0)


class TestStableCharfn:
    def test_value_at_zero(self):
        assert stable_charfn(1.5, 1.0, 1.0, 0.0) == pytest.approx(1.0 + 0.0j)

    def test_frozen_reference_value(self):
        # frozen from a 30-digit mpmath evaluation of the same formula
        got = stable_charfn(1.5, 1.0, 1.0, 1.0)
        assert got.real == pytest.approx(-0.065649455543815862, abs=1e-12)
        assert got.imag == pytest.approx(-0.048366967056994576, abs=1e-12)

    def test_conjugate_symmetry(self):
        for z in (0.1, 0.5, 1.0, 3.0):
            plus = stable_charfn(1.7, 2.0, 1.3, z)
            minus = stable_charfn(1.7, 2.0, 1.3, -z)
            assert minus == pytest.approx(plus.conjugate(), rel=1e-12)

    def test_modulus_bounded(self):
        zs = np.linspace(-5, 5, 41)
        vals = stable_charfn(1.5, 1.0, 2.0, zs)
        assert np.all(np.abs(vals) <= 1.0 + 1e-12)

    def test_exponent_real_part_negative(self):
        # log-modulus must be -t|z|^alpha times a positive constant
        for alpha in np.linspace(1.05, 1.95, 19):
            val = stable_charfn(float(alpha), 1.0, 1.0, 1.0)
            assert abs(val) < 1.0

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            stable_charfn(2.3, 1.0, 1.0, 1.0)


class TestTheoryReport:
    def test_long_memory_fields(self):
        rep = theory_report(POISSON, PL, max_lag=5)
        assert rep.regime == "long-memory"
        assert rep.c1 == pytest.approx(2.0)
        assert rep.c2 == pytest.approx(16.0 / 3.0)
        assert rep.H == pytest.approx(0.75)
        assert rep.sigma2 is None
        assert rep.mean == pytest.approx(2.612375, abs=1e-6)
        assert len(rep.autocov) == 6

    def test_short_memory_fields(self):
        rep = theory_report(BM, GEO, max_lag=3)
        assert rep.regime == "short-memory"
        assert rep.sigma2 == pytest.approx(6.0)
        assert rep.c1 is None and rep.c2 is None and rep.H is None

    def test_json_field_names(self):
        rep = theory_report(BM, GEO, max_lag=2)
        data = rep.to_dict()
        assert set(data) == {"mean", "autocov", "sigma2", "c1", "c2", "H", "regime", "warnings"}
