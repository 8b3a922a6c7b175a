"""Analytic moments, asymptotic constants and limit-law descriptors.

Autocovariances split into a linear part with closed-form tail sums (power
law: Hurwitz zeta; geometric: geometric series) plus a superlinear residual
summed numerically with a certified tail bound, so every returned value
carries an absolute error below the requested tolerance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from .seeds import SeedModel
from .trawl import DivergentSeriesError, TrawlSequence, condition_report

BOUNDARY_MARGIN = 0.05  # alpha this close to 1 or 2 degrades c1/c2 conditioning

_RESIDUAL_CAP = 2_000_000


class ToleranceNotReached(RuntimeError):
    """Certified tail bound could not be pushed below the requested tol."""


def _check_bernoulli_domain(seed: SeedModel, t: TrawlSequence) -> None:
    if seed.kind != "bernoulli":
        return
    a_max = max(t.values) if t.kind == "custom" else t.value(0)
    if a_max > 1.0:
        raise ValueError("bernoulli seed requires trawl values <= 1")


# -- residual structure of rho per seed family -------------------------------
#
# rho(u, v) = lin * (u ^ v) + residual(u, v) with residual superlinear.


def _linear_coefficient(seed: SeedModel) -> float:
    if seed.kind in ("bm", "poisson", "bernoulli"):
        return 1.0
    if seed.kind == "mixed-poisson":
        return seed.mixing.mean
    if seed.kind == "gbm":
        return 1.0
    return 0.0  # line; diffusion handled separately


def _product_coefficient(seed: SeedModel) -> float:
    """q in the residual term q * u * v (0 when absent)."""
    if seed.kind == "bernoulli":
        return -1.0
    if seed.kind == "mixed-poisson":
        return seed.mixing.variance
    if seed.kind == "line":
        return seed.sigma_xi2
    return 0.0


def rho_linear_bound(seed: SeedModel, t: TrawlSequence) -> float:
    """L with |rho(u, v)| <= L * (u ^ v) for arguments up to a_0."""
    a0 = t.value(0)
    if seed.kind in ("bm", "poisson", "bernoulli"):
        return 1.0
    if seed.kind == "mixed-poisson":
        return seed.mixing.mean + seed.mixing.variance * a0
    if seed.kind == "line":
        return seed.sigma_xi2 * a0
    if seed.kind == "gbm":
        return float(np.exp(a0))
    return seed.variance_slope()


def _monotone_linear_sum(t: TrawlSequence, k: int) -> float:
    """sum_j a_j ^ a_{j+k} for a monotone trawl = tail sum from k."""
    return t.tail_sum(k)


def _residual_sum(seed: SeedModel, t: TrawlSequence, k: int, tol: float) -> float:
    """Certified sum of residual(a_j, a_{j+k}) over j >= 0 for monotone trawls."""
    q = _product_coefficient(seed)
    kind = seed.kind
    if q == 0.0 and kind not in ("gbm", "diffusion"):
        return 0.0

    total = 0.0
    j_hi = 0
    block = 4096
    while True:
        j = np.arange(j_hi, j_hi + block, dtype=float)
        aj = t.head(j_hi + block)[j_hi:]
        ajk = (
            t.c0 * (j + k + 1.0) ** (-t.alpha)
            if t.kind == "power-law"
            else t.a ** (j + k)
            if t.kind == "geometric"
            else np.array([t.value(int(x) + k) for x in j])
        )
        if kind == "gbm":
            total += float(np.sum(np.expm1(ajk) - ajk))
        elif kind == "diffusion":
            total += float(sum(seed.variance(v) for v in ajk))
        else:
            total += q * float(np.sum(aj * ajk))
        j_hi += block

        # tail bounds over j >= j_hi
        if kind == "gbm":
            tail = 0.5 * math.exp(t.value(0)) * t.tail_sum_power(j_hi + k, 2.0)
        elif kind == "diffusion":
            tail = seed.variance_slope() * t.tail_sum(j_hi + k)
        else:
            tail = abs(q) * t.value(j_hi + k) * t.tail_sum(j_hi)
        if tail <= tol:
            return total
        if j_hi >= _RESIDUAL_CAP:
            raise ToleranceNotReached(
                f"residual tail bound {tail:.3e} > tol {tol:.3e} after {j_hi} terms"
            )
        block = min(block * 2, 262_144)


def trawl_mean(seed: SeedModel, t: TrawlSequence, tol: float = 1e-12) -> float:
    """E X_k = sum_j mu(a_j); exact for the built-in (linear-mean) families."""
    _check_bernoulli_domain(seed, t)
    slope = seed.mean_slope()
    if slope == 0.0:
        return 0.0
    return slope * t.tail_sum(0)


def trawl_autocovariance(
    seed: SeedModel, t: TrawlSequence, k: int, tol: float = 1e-10
) -> float:
    """Cov(X_0, X_k) = sum_j rho(a_j, a_{j+k}), certified within tol."""
    if k < 0:
        raise ValueError("lag must be nonnegative")
    _check_bernoulli_domain(seed, t)

    if t.kind == "custom":
        # finite support: direct exact summation
        m = len(t.values)
        return float(
            sum(seed.covariance(t.value(j), t.value(j + k)) for j in range(m))
        )

    lin = _linear_coefficient(seed)
    total = lin * _monotone_linear_sum(t, k) if lin else 0.0
    total += _residual_sum(seed, t, k, tol)
    return total


def autocovariance_curve(
    seed: SeedModel, t: TrawlSequence, max_lag: int, tol: float = 1e-10
) -> np.ndarray:
    """[Cov(X_0, X_k)]_{k=0..max_lag}."""
    return np.array(
        [trawl_autocovariance(seed, t, k, tol) for k in range(max_lag + 1)]
    )


def asymptotic_constants(c0: float, alpha: float) -> tuple[float, float, float]:
    """(c1, c2, H) for the long-memory regime: covariance level, partial-sum
    variance level and the Hurst exponent."""
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    if alpha - 1.0 < BOUNDARY_MARGIN or 2.0 - alpha < BOUNDARY_MARGIN:
        warnings.warn(
            f"alpha={alpha} is within {BOUNDARY_MARGIN} of the interval boundary; "
            "c1/c2 are badly conditioned there",
            RuntimeWarning,
            stacklevel=2,
        )
    c1 = c0 / (alpha - 1.0)
    c2 = 2.0 * c1 / ((2.0 - alpha) * (3.0 - alpha))
    hurst = (3.0 - alpha) / 2.0
    return c1, c2, hurst


def sigma_squared(seed: SeedModel, t: TrawlSequence, tol: float = 1e-10) -> float:
    """sum over all integer lags of Cov(X_0, X_k), short-memory regime only."""
    _check_bernoulli_domain(seed, t)
    report = condition_report(seed, t)
    if report["regime"] == "long-memory":
        raise DivergentSeriesError(
            "autocovariances are not absolutely summable in the long-memory regime"
        )

    if t.kind == "custom":
        m = len(t.values)
        total = trawl_autocovariance(seed, t, 0, tol)
        for k in range(1, m + 1):
            total += 2.0 * trawl_autocovariance(seed, t, k, tol)
        return total

    bound_coeff = rho_linear_bound(seed, t)
    total = trawl_autocovariance(seed, t, 0, tol / 4)
    k = 1
    while True:
        total += 2.0 * trawl_autocovariance(seed, t, k, tol / (8 * k * k))
        # remaining lags: 2 * sum_{l>k} gamma(l) <= 2 L sum_{l>k} T(l)
        tail = 2.0 * bound_coeff * t.a ** (k + 1) / (1.0 - t.a) ** 2
        if tail <= tol / 2:
            return total
        k += 1


def fbm_covariance(hurst: float, s: float, t: float) -> float:
    """Fractional Brownian motion covariance (unit scale)."""
    if not (0.0 < hurst < 1.0):
        raise ValueError("hurst must lie in (0, 1)")
    if s < 0 or t < 0:
        raise ValueError("times must be nonnegative")
    h2 = 2.0 * hurst
    return 0.5 * (s**h2 + t**h2 - abs(t - s) ** h2)


def stable_charfn(alpha: float, c0: float, t: float, z) -> complex:
    """Characteristic function of the limiting alpha-stable Levy process at
    time t, evaluated at z (scalar or array).

    The exponent constant is c0*Gamma(2-alpha)/(1-alpha), negative on (1,2),
    times cos(pi alpha/2) - i sgn(z) sin(pi alpha/2); the real part of the
    exponent is strictly negative so the modulus is <= 1.
    """
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in (1, 2), got {alpha}")
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    z_arr = np.asarray(z, dtype=float)
    const = c0 * gamma_fn(2.0 - alpha) / (1.0 - alpha)
    angle = math.pi * alpha / 2.0
    expo = (
        -t
        * np.abs(z_arr) ** alpha
        * const
        * (math.cos(angle) - 1j * np.sign(z_arr) * math.sin(angle))
    )
    out = np.exp(expo)
    return complex(out) if np.isscalar(z) or z_arr.ndim == 0 else out


# -- aggregate report ---------------------------------------------------------


@dataclass
class TheoryReport:
    """Analytic summary for one (seed, trawl) pair."""

    mean: float
    autocov: list
    regime: str
    sigma2: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    H: Optional[float] = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "autocov": list(self.autocov),
            "sigma2": self.sigma2,
            "c1": self.c1,
            "c2": self.c2,
            "H": self.H,
            "regime": self.regime,
            "warnings": list(self.warnings),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def theory_report(
    seed: SeedModel,
    t: TrawlSequence,
    max_lag: int = 20,
    tol: float = 1e-10,
) -> TheoryReport:
    """Assemble mean, autocovariances and regime constants for a pair."""
    _check_bernoulli_domain(seed, t)
    report = condition_report(seed, t)
    regime = report["regime"]
    notes: list = []
    mean = trawl_mean(seed, t, tol)
    autocov = [trawl_autocovariance(seed, t, k, tol) for k in range(max_lag + 1)]
    sigma2 = c1 = c2 = hurst = None
    if regime == "long-memory":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            c1, c2, hurst = asymptotic_constants(t.c0, t.alpha)
        notes.extend(str(w.message) for w in caught)
    elif regime == "short-memory":
        sigma2 = sigma_squared(seed, t, tol)
    return TheoryReport(
        mean=mean,
        autocov=autocov,
        regime=regime,
        sigma2=sigma2,
        c1=c1,
        c2=c2,
        H=hurst,
        warnings=notes,
    )
