"""Trajectory generation for trawl processes.

Engines, in order of preference:

* exact jump engine (Poisson / mixed Poisson / Bernoulli seeds, monotone
  trawl): each jump of each recent source becomes one range-add on the path;
  for the Poisson seed the whole infinite past collapses exactly to
  independent Poisson column sums, so power-law trawls are simulated with
  zero truncation error at O(n) cost.
* Gaussian engines (Brownian / geometric Brownian seeds, monotone trawl):
  per-cell increment kernels; the infinite past of the Brownian seed
  aggregates exactly to independent Gaussian column sums.
* generic banded engine (everything else, and whenever ``engine="generic"``
  is forced): one seed path per source inside a certified horizon.

Every output is a pure function of (master_seed, replica_index, parameters);
replicas never share generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .seeds import SeedModel
from .theory import ToleranceNotReached, trawl_mean
from .trawl import TrawlSequence, condition_report, tail_mean_sum, tail_variance_sum

HORIZON_CAP = 50_000_000  # refuse horizons beyond this; ask for an override


@dataclass(frozen=True)
class SimOptions:
    """Simulation controls.

    ``truncation_tol`` bounds E|truncation error| per coordinate.  ``engine``
    is "auto" (pick the fastest exact engine) or "generic" (force the
    per-source reference engine).  ``rng_branch`` separates independent
    processes driven by the same (master_seed, replica_index), e.g. the two
    arms of a difference construction.
    """

    master_seed: int = 0
    replica_index: int = 0
    truncation_tol: float = 1e-3
    past_horizon_override: Optional[int] = None
    engine: str = "auto"
    rng_branch: int = 0

    def __post_init__(self):
        if self.truncation_tol <= 0:
            raise ValueError("truncation_tol must be positive")
        if self.engine not in ("auto", "generic"):
            raise ValueError("engine must be 'auto' or 'generic'")


@dataclass
class TrawlPath:
    """One simulated trajectory X_1..X_n.

    ``past_horizon_used`` is -1 when the infinite past was handled exactly
    (no truncation); ``truncation_mean_bound`` bounds E|truncation error| per
    coordinate and is 0 for exact engines.  ``theoretical_mean`` is the mean
    of the simulated (possibly truncated) process.
    """

    values: np.ndarray
    theoretical_mean: float
    past_horizon_used: int
    truncation_mean_bound: float

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass
class Decomposition:
    """Per-source contributions Z_s = sum_k gamma_s(a_{k-s}) for one run.

    ``sources`` lists s from 1-S to n; ``terms[i]`` is Z_{sources[i]};
    ``x_values`` is the path generated from the same draws, so
    sum(terms) == sum(x_values) identically.
    """

    sources: np.ndarray
    terms: np.ndarray
    x_values: np.ndarray


def replica_rng(master_seed: int, replica_index: int, branch: int = 0) -> np.random.Generator:
    """Independent, reproducible stream for one replica."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(replica_index), int(branch)))
    return np.random.Generator(np.random.SFC64(ss))


def _options_rng(opts: SimOptions) -> np.random.Generator:
    return replica_rng(opts.master_seed, opts.replica_index, opts.rng_branch)


def _validate_pair(seed: SeedModel, t: TrawlSequence) -> None:
    if seed.kind == "bernoulli":
        a_max = max(t.values) if t.kind == "custom" else t.value(0)
        if a_max > 1.0:
            raise ValueError("bernoulli seed requires trawl values <= 1")
    # existence: sum g(a_j) must be finite (always true for built-in trawls,
    # but the call raises for genuinely divergent configurations)
    tail_variance_sum(seed, t, 0)


# -- truncation horizon -------------------------------------------------------


def choose_past_horizon(seed: SeedModel, t: TrawlSequence, n: int, tol: float) -> int:
    """Smallest horizon S with certified truncation error per coordinate.

    Nonnegative (jump) seeds control the first moment directly:
    sum_{j>S} mu(a_j) <= tol.  Mean-zero seeds control the standard
    deviation: sum_{j>S} g(a_j) <= tol**2.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t.kind == "custom":
        return int(t.support)

    if seed.is_jump:
        def ok(s: int) -> bool:
            return tail_mean_sum(seed, t, s) <= tol
    else:
        def ok(s: int) -> bool:
            return tail_variance_sum(seed, t, s) <= tol * tol

    if not ok(HORIZON_CAP):
        raise ToleranceNotReached(
            f"truncation tol {tol:g} needs a past horizon beyond {HORIZON_CAP}; "
            "loosen truncation_tol or set past_horizon_override"
        )
    lo, hi = 0, 1
    while not ok(hi):
        lo, hi = hi, hi * 2
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


# -- jump-seed machinery ------------------------------------------------------


def level_count_fn(t: TrawlSequence) -> Callable[[np.ndarray], np.ndarray]:
    """Returns m(tau) = #{j >= 0 : a_j >= tau} as a vectorized callable."""
    if t.kind == "power-law":
        c0, alpha = t.c0, t.alpha

        def count(tau: np.ndarray) -> np.ndarray:
            return np.floor((c0 / tau) ** (1.0 / alpha)).astype(np.int64)

        return count
    if t.kind == "geometric":
        la = math.log(t.a)

        def count(tau: np.ndarray) -> np.ndarray:
            out = np.floor(np.log(tau) / la).astype(np.int64) + 1
            return np.maximum(out, 0)

        return count
    vals = np.asarray(t.values, dtype=float)
    if not t.is_monotone:
        raise ValueError("level counts need a monotone trawl")
    neg_desc = -vals

    def count(tau: np.ndarray) -> np.ndarray:
        return np.searchsorted(neg_desc, -np.asarray(tau), side="right").astype(np.int64)

    return count


def accumulate_jump_ranges(x: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> None:
    """Add +1 to x[k] for k in [starts_i, ends_i] (1-based, inclusive).

    Entries with ends < starts are ignored.  x has length n+1; index 0 unused.
    """
    n = x.size - 1
    keep = ends >= starts
    if not np.any(keep):
        return
    starts = starts[keep]
    ends = ends[keep]
    diff = np.zeros(n + 2)
    np.add.at(diff, starts, 1.0)
    np.add.at(diff, ends + 1, -1.0)
    x += np.cumsum(diff)[: n + 1]


def _jump_engine(
    seed: SeedModel, t: TrawlSequence, n: int, opts: SimOptions, rng: np.random.Generator
) -> TrawlPath:
    """Exact jump construction for monotone trawls."""
    a0 = t.value(0)
    count_levels = level_count_fn(t)
    x = np.zeros(n + 1)

    exact_past = seed.kind == "poisson"
    horizon = -1
    mean_bound = 0.0
    if exact_past:
        # infinite past, aggregated exactly: column sums are Poisson(a_m)
        lam = np.append(t.head(n)[1:], t.tail_sum(n))
        col = rng.poisson(lam).astype(float)
        x[1:] += np.cumsum(col[::-1])[::-1]
        theo_mean = trawl_mean(seed, t)
    else:
        horizon = (
            int(opts.past_horizon_override)
            if opts.past_horizon_override is not None
            else choose_past_horizon(seed, t, n, opts.truncation_tol)
        )
        _far_jump_truncated(seed, t, n, horizon, rng, x, count_levels)
        mean_bound = tail_mean_sum(seed, t, horizon)
        theo_mean = trawl_mean(seed, t) - mean_bound

    # recent sources s = 1..n: jump times on (0, a_0], one range-add per jump
    if seed.kind == "bernoulli":
        u = rng.random(n)
        active = u <= a0
        src = np.nonzero(active)[0] + 1
        taus = u[active]
    else:
        if seed.kind == "poisson":
            counts = rng.poisson(a0, size=n)
        else:
            zeta_s = seed.mixing.sample(rng, n)
            counts = rng.poisson(a0 * zeta_s)
        total = int(counts.sum())
        src = np.repeat(np.arange(1, n + 1), counts)
        taus = a0 * (1.0 - rng.random(total))
    if src.size:
        m = np.minimum(count_levels(taus), n + 1)
        ends = np.minimum(n, src + m - 1)
        accumulate_jump_ranges(x, src, ends)

    return TrawlPath(
        values=x[1:],
        theoretical_mean=theo_mean,
        past_horizon_used=horizon,
        truncation_mean_bound=mean_bound,
    )


def _far_jump_truncated(seed, t, n, horizon, rng, x, count_levels) -> None:
    """Truncated past for non-Levy jump seeds (Bernoulli, mixed Poisson).

    Source s = 1 - s' (s' = 1..horizon) sees heights a_{k+s'-1} <= a_{s'};
    a jump at tau adds +1 to X_k for k <= m(tau) - s'.
    """
    if horizon <= 0:
        return
    heights = t.head(horizon + 1)[1:]  # a_{s'} for s' = 1..horizon
    if seed.kind == "bernoulli":
        u = rng.random(horizon)
        active = u <= heights
        s_prime = np.nonzero(active)[0] + 1
        taus = u[active]
    else:
        zeta_s = seed.mixing.sample(rng, horizon)
        counts = rng.poisson(heights * zeta_s)
        total = int(counts.sum())
        s_prime = np.repeat(np.arange(1, horizon + 1), counts)
        taus = heights[s_prime - 1] * (1.0 - rng.random(total))
    if s_prime.size == 0:
        return
    m = np.minimum(count_levels(taus), np.int64(n) + s_prime)
    ends = np.minimum(n, m - s_prime)
    starts = np.ones_like(ends)
    accumulate_jump_ranges(x, starts, ends)


# -- Gaussian engines ---------------------------------------------------------


def _gaussian_far_past(t: TrawlSequence, n: int, rng: np.random.Generator, x: np.ndarray) -> None:
    """Exact aggregate of all sources s <= 0 for the Brownian seed."""
    sd = np.sqrt(np.append(t.head(n)[1:], t.tail_sum(n)))
    w = rng.standard_normal(n) * sd
    x[1:] += np.cumsum(w[::-1])[::-1]


def _gaussian_band(seed: SeedModel, t: TrawlSequence, n: int, opts: SimOptions) -> tuple[int, int, float]:
    """(band, reported_horizon, mean_bound) for the dense Gaussian kernels."""
    if opts.past_horizon_override is not None:
        s_var = int(opts.past_horizon_override)
    else:
        try:
            s_var = choose_past_horizon(seed, t, n, opts.truncation_tol)
        except ToleranceNotReached:
            s_var = n - 1  # full triangle is exact for the Brownian seed
    if seed.kind == "bm" and s_var >= n - 1:
        return n - 1, -1, 0.0
    band = min(s_var, n - 1)
    bound = math.sqrt(tail_variance_sum(seed, t, band)) if band < n - 1 else 0.0
    return band, band, bound


def _brownian_engine(seed, t, n, opts, rng) -> TrawlPath:
    band, horizon, bound = _gaussian_band(seed, t, n, opts)
    levels = t.head(band + 2)
    sd_base = np.sqrt(levels[: band + 1])
    sd_gap = np.sqrt(levels[: band + 1] - levels[1 : band + 2])
    x = np.zeros(n + 1)
    _gaussian_far_past(t, n, rng, x)
    _kernels.brownian_recent(n, band, sd_base, sd_gap, rng, x)
    return TrawlPath(
        values=x[1:],
        theoretical_mean=0.0,
        past_horizon_used=horizon,
        truncation_mean_bound=bound,
    )


def _gbm_engine(seed, t, n, opts, rng) -> TrawlPath:
    # not a Levy seed: both the past and the recent band are truncated
    if opts.past_horizon_override is not None:
        band = int(opts.past_horizon_override)
    else:
        band = choose_past_horizon(seed, t, n, opts.truncation_tol)
    bound = math.sqrt(tail_variance_sum(seed, t, band))
    x = np.zeros(n + 1)
    _gbm_far_truncated(t, n, band, rng, x)
    b = min(band, n - 1)
    levels = t.head(b + 2)
    _kernels.gbm_recent(n, b, np.sqrt(levels[: b + 1]), np.sqrt(levels[: b + 1] - levels[1 : b + 2]), levels[: b + 1], rng, x)
    return TrawlPath(
        values=x[1:],
        theoretical_mean=0.0,
        past_horizon_used=band,
        truncation_mean_bound=bound,
    )


def _gbm_far_truncated(t, n, horizon, rng, x) -> None:
    """Past sources s = 1-s', s' = 1..horizon, each a full GBM path."""
    for s_prime in range(1, horizon + 1):
        j_lo, j_hi = s_prime, min(horizon, n - 1 + s_prime)
        if j_lo > j_hi:
            continue
        levels = np.array([t.value(j) for j in range(j_lo, j_hi + 1)])
        asc = levels[::-1]
        inc = np.sqrt(np.diff(np.concatenate(([0.0], asc))))
        b = np.cumsum(inc * rng.standard_normal(asc.size))
        vals = np.expm1(b - asc / 2.0)[::-1]
        ks = np.arange(j_lo, j_hi + 1) + (1 - s_prime)
        x[ks] += vals


def _randomline_engine(seed, t, n, opts, rng) -> TrawlPath:
    if opts.past_horizon_override is not None:
        band = int(opts.past_horizon_override)
    else:
        band = choose_past_horizon(seed, t, n, opts.truncation_tol)
    bound = math.sqrt(tail_variance_sum(seed, t, band))
    weights = t.head(band + 1)
    xi = rng.normal(0.0, math.sqrt(seed.sigma_xi2), size=n + band)
    # X_k = sum_j a_j xi_{k-j}; xi index k-j runs 1-band..n
    full = np.convolve(xi, weights)
    x = full[band : band + n]
    return TrawlPath(
        values=x,
        theoretical_mean=0.0,
        past_horizon_used=band,
        truncation_mean_bound=bound,
    )


# -- generic reference engine -------------------------------------------------


def _generic_engine(
    seed, t, n, opts, rng, want_decomposition: bool = False
):
    if opts.past_horizon_override is not None:
        horizon = int(opts.past_horizon_override)
    else:
        horizon = choose_past_horizon(seed, t, n, opts.truncation_tol)
    if horizon + n > 500_000:
        raise ToleranceNotReached(
            f"generic engine would loop over {horizon + n} sources; loosen "
            "truncation_tol, set past_horizon_override, or use a fast engine"
        )
    if seed.is_jump:
        mean_bound = tail_mean_sum(seed, t, horizon)
    else:
        mean_bound = math.sqrt(tail_variance_sum(seed, t, horizon))
    theo_mean = trawl_mean(seed, t) - (mean_bound if seed.is_jump else 0.0)

    heights = t.head(horizon + n + 1)
    x = np.zeros(n + 1)
    sources = np.arange(1 - horizon, n + 1)
    terms = np.zeros(sources.size)
    for i, s in enumerate(sources):
        j_lo = max(0, 1 - s)
        j_hi = min(horizon, n - s)
        if j_lo > j_hi:
            continue
        js = np.arange(j_lo, j_hi + 1)
        args = heights[js]
        order = np.argsort(args, kind="stable")
        vals_sorted = seed.sample_path(args[order], rng)
        vals = np.empty_like(vals_sorted)
        vals[order] = vals_sorted
        ks = s + js
        x[ks] += vals
        terms[i] = vals.sum()

    path = TrawlPath(
        values=x[1:],
        theoretical_mean=theo_mean,
        past_horizon_used=horizon,
        truncation_mean_bound=mean_bound,
    )
    if want_decomposition:
        return Decomposition(sources=sources, terms=terms, x_values=x[1:].copy()), path
    return path


# -- public operations ---------------------------------------------------------


def simulate_path(seed: SeedModel, t: TrawlSequence, n: int, opts: SimOptions) -> TrawlPath:
    """Simulate X_1..X_n; deterministic in (master_seed, replica_index, params)."""
    if n < 1:
        raise ValueError("n must be positive")
    _validate_pair(seed, t)
    rng = _options_rng(opts)
    if opts.engine == "generic":
        return _generic_engine(seed, t, n, opts, rng)
    if seed.is_jump and t.is_monotone:
        return _jump_engine(seed, t, n, opts, rng)
    if seed.kind == "bm" and t.is_monotone:
        return _brownian_engine(seed, t, n, opts, rng)
    if seed.kind == "gbm" and t.is_monotone:
        return _gbm_engine(seed, t, n, opts, rng)
    if seed.kind == "line":
        return _randomline_engine(seed, t, n, opts, rng)
    return _generic_engine(seed, t, n, opts, rng)


def simulate_decomposition(
    seed: SeedModel, t: TrawlSequence, n: int, opts: SimOptions
) -> Decomposition:
    """Per-source sums Z_{s,n} plus the path built from the same draws.

    Always runs the generic reference engine, so the result matches
    ``simulate_path(..., opts with engine="generic")`` draw for draw.
    """
    if n < 1:
        raise ValueError("n must be positive")
    _validate_pair(seed, t)
    rng = _options_rng(opts)
    decomp, _path = _generic_engine(seed, t, n, opts, rng, want_decomposition=True)
    return decomp


def sample_Z(
    seed: SeedModel,
    t: TrawlSequence,
    opts: SimOptions,
    size: Optional[int] = None,
) -> float | np.ndarray:
    """Exact draws of the aggregate variable Z = sum_j gamma(a_j).

    For jump seeds the infinite series collapses to a finite computation over
    the jump times below a_0 (Z = sum_i #{j : a_j >= tau_i}), so no
    truncation is involved even for power-law trawls.
    """
    _validate_pair(seed, t)
    rng = _options_rng(opts)
    m = 1 if size is None else int(size)

    if seed.is_jump and t.is_monotone:
        count_levels = level_count_fn(t)
        a0 = t.value(0)
        if seed.kind == "bernoulli":
            u = rng.random(m)
            z = np.zeros(m)
            act = u <= a0
            if np.any(act):
                z[act] = count_levels(u[act]).astype(float)
        else:
            if seed.kind == "poisson":
                counts = rng.poisson(a0, size=m)
            else:
                counts = rng.poisson(a0 * seed.mixing.sample(rng, m))
            taus = a0 * (1.0 - rng.random(int(counts.sum())))
            owners = np.repeat(np.arange(m), counts)
            z = np.zeros(m)
            if taus.size:
                np.add.at(z, owners, count_levels(taus).astype(float))
        return float(z[0]) if size is None else z

    if t.kind == "custom":
        support = t.support
        vals = np.asarray(t.values[:support], dtype=float)
        order = np.argsort(vals, kind="stable")
        z = np.empty(m)
        for i in range(m):
            sampled = seed.sample_path(vals[order], rng)
            z[i] = float(sampled.sum())
        return float(z[0]) if size is None else z

    raise ValueError(
        "exact Z draws need a jump seed with a monotone trawl or a finite custom trawl"
    )
