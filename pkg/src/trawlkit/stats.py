"""Empirical estimators and goodness-of-fit statistics.

Sample sets are plain 1-d numpy arrays.  Autocovariances use the biased 1/n
normalization (positive semidefinite estimate); survival probabilities use the
strict inequality P(Z > y).
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def _as_samples(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("empty sample set")
    return arr


def sample_autocovariance(path, k: int, mean: float | None = None) -> float:
    """Lag-k autocovariance (1/n)sum_{i<=n-k}(x_i - m)(x_{i+k} - m).

    ``mean`` defaults to the sample mean; pass the analytic process mean to
    avoid the downward bias of mean-centered estimates under long memory.
    """
    x = _as_samples(path)
    n = x.size
    if k < 0 or k >= n:
        raise ValueError(f"lag {k} out of range for path of length {n}")
    m = x.mean() if mean is None else float(mean)
    d = x - m
    return float(np.dot(d[: n - k], d[k:]) / n)


def sample_autocovariance_curve(path, max_lag: int, mean: float | None = None) -> np.ndarray:
    """Autocovariances at lags 0..max_lag via FFT (same estimator as above)."""
    x = _as_samples(path)
    n = x.size
    if max_lag < 0 or max_lag >= n:
        raise ValueError(f"max_lag {max_lag} out of range for path of length {n}")
    m = x.mean() if mean is None else float(mean)
    d = x - m
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(d, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    return acov / n


def partial_sum_variance(paths, n_grid: Sequence[int]) -> list[tuple[int, float]]:
    """Across-replica sample variance of S_n = sum_{k<=n} X_k per grid point.

    ``paths`` is a (replicas, length) array; needs at least two replicas.
    """
    arr = np.asarray(paths, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("need a 2-d array with at least two replica paths")
    csum = np.cumsum(arr, axis=1)
    out = []
    for n in n_grid:
        if not (1 <= n <= arr.shape[1]):
            raise ValueError(f"grid point {n} exceeds path length {arr.shape[1]}")
        out.append((int(n), float(np.var(csum[:, n - 1], ddof=1))))
    return out


def scaling_exponent_fit(pairs) -> tuple[float, float, float]:
    """OLS fit of log v on log n; returns (slope, intercept, r_squared)."""
    pts = [(float(n), float(v)) for n, v in pairs]
    if len(pts) < 3:
        raise ValueError("need at least three (n, v) pairs")
    n_arr = np.array([p[0] for p in pts])
    v_arr = np.array([p[1] for p in pts])
    if np.any(n_arr <= 0) or np.any(v_arr <= 0):
        raise ValueError("log-log fit needs strictly positive values")
    x, y = np.log(n_arr), np.log(v_arr)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def empirical_charfn(samples, z_grid) -> np.ndarray:
    """(1/m) sum_j exp(i z x_j) for each z; modulus never exceeds 1."""
    x = _as_samples(samples)
    z = np.atleast_1d(np.asarray(z_grid, dtype=float))
    return np.exp(1j * np.outer(z, x)).mean(axis=1)


def ks_statistic(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided Kolmogorov-Smirnov sup-distance against a cdf callable."""
    x = np.sort(_as_samples(samples))
    m = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.max(np.arange(1, m + 1) / m - f)
    lower = np.max(f - np.arange(0, m) / m)
    return float(min(1.0, max(upper, lower, 0.0)))


def tail_ratio(samples, alpha: float, y_grid) -> list[tuple[float, float]]:
    """(y, y^alpha * empirical P(Z > y)) over the grid; strict survival."""
    x = np.sort(_as_samples(samples))
    m = x.size
    out = []
    for y in np.atleast_1d(np.asarray(y_grid, dtype=float)):
        if y <= 0:
            raise ValueError("tail grid must be positive")
        surv = (m - np.searchsorted(x, y, side="right")) / m
        out.append((float(y), float(y**alpha * surv)))
    return out
