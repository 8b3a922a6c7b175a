"""Numba kernels for the dense Gaussian-seed engines.

A cell (s, j) is the increment of source s's Brownian path between
consecutive trawl heights a_{j+1} and a_j.  Sources enter at their deepest
needed level min(band, n - s) with a base draw from height zero and then
receive independent gap increments while the level index descends to 0.
Draw order is fixed (existing sources ascending, then the entering source),
which pins the output for a given generator state.
"""

import numba as nb
import numpy as np


@nb.njit(cache=True)
def brownian_recent(n, band, sd_base, sd_gap, rng, x):
    """Accumulate sum_{j<=band} B_{k-j}(a_j) over recent sources s=1..n.

    sd_base[j] = sqrt(a_j); sd_gap[j] = sqrt(a_j - a_{j+1}); x has length n+1
    and is indexed 1..n.
    """
    b = np.zeros(n + 1)
    for j in range(band, -1, -1):
        m = n - j  # active sources 1..m
        if j == band:
            for s in range(1, m + 1):
                b[s] = rng.standard_normal() * sd_base[j]
        else:
            g = sd_gap[j]
            for s in range(1, m):
                b[s] += rng.standard_normal() * g
            b[m] = rng.standard_normal() * sd_base[j]
        for s in range(1, m + 1):
            x[s + j] += b[s]


@nb.njit(cache=True)
def gbm_recent(n, band, sd_base, sd_gap, levels, rng, x):
    """Like brownian_recent but accumulating exp(B(a_j) - a_j/2) - 1."""
    b = np.zeros(n + 1)
    for j in range(band, -1, -1):
        m = n - j
        if j == band:
            for s in range(1, m + 1):
                b[s] = rng.standard_normal() * sd_base[j]
        else:
            g = sd_gap[j]
            for s in range(1, m):
                b[s] += rng.standard_normal() * g
            b[m] = rng.standard_normal() * sd_base[j]
        half = 0.5 * levels[j]
        for s in range(1, m + 1):
            x[s + j] += np.exp(b[s] - half) - 1.0
