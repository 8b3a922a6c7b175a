"""Seed-process families: analytic moments and path-consistent sampling.

A seed is a stochastic process ``gamma(u)`` on ``u >= 0`` with ``gamma(0) = 0``,
known mean ``mu(u)``, variance ``g(u)`` and covariance ``rho(u, v)``.  The trawl
machinery evaluates i.i.d. copies of one seed at the trawl heights, so every
sampler here returns a *single consistent realization* evaluated at all
requested arguments.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad


JUMP_KINDS = ("poisson", "mixed-poisson", "bernoulli")
MEAN_ZERO_KINDS = ("line", "bm", "gbm", "diffusion")


class SeedDomainError(ValueError):
    """Argument outside the seed's domain (e.g. Bernoulli beyond [0, 1])."""


class UnsupportedSeedOperation(TypeError):
    """Operation not defined for this seed kind (e.g. jump times of a BM)."""


@dataclass(frozen=True)
class MixingLaw:
    """Positive mixing variable for the mixed Poisson seed.

    ``exponential`` draws with the given ``rate`` (mean 1/rate); ``constant``
    is the degenerate law at ``value``.
    """

    kind: str = "exponential"
    rate: float = 1.0
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exponential", "constant"):
            raise ValueError(f"unknown mixing law {self.kind!r}")
        if self.kind == "exponential" and self.rate <= 0:
            raise ValueError("exponential mixing needs rate > 0")
        if self.kind == "constant" and self.value <= 0:
            raise ValueError("constant mixing needs value > 0")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate if self.kind == "exponential" else self.value

    @property
    def variance(self) -> float:
        return 1.0 / self.rate**2 if self.kind == "exponential" else 0.0

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        if self.kind == "exponential":
            return rng.exponential(1.0 / self.rate, size=size)
        if size is None:
            return self.value
        return np.full(size, self.value)

    @classmethod
    def from_config(cls, cfg: dict) -> "MixingLaw":
        kind = cfg.get("kind", "exponential")
        if kind == "exponential":
            return cls(kind="exponential", rate=float(cfg.get("rate", 1.0)))
        return cls(kind="constant", value=float(cfg.get("value", 1.0)))


@dataclass(frozen=True)
class SeedModel:
    """One parameterized seed family.

    kind is one of ``line`` (xi*u with Var xi = sigma_xi2), ``bm`` (standard
    Brownian motion), ``poisson`` (unit-rate Poisson counting process),
    ``mixed-poisson`` (Poisson at rescaled time u*zeta), ``bernoulli``
    (indicator 1(U <= u), U uniform on [0,1]), ``gbm``
    (exp(B(u) - u/2) - 1) or ``diffusion`` (Ito integral of a deterministic
    volatility ``b`` against BM, Euler-sampled on a grid of step ``h``).
    """

    kind: str
    sigma_xi2: float = 1.0
    mixing: MixingLaw = field(default_factory=MixingLaw)
    volatility: Optional[Callable[[float], float]] = None
    euler_step: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (
            "line",
            "bm",
            "poisson",
            "mixed-poisson",
            "bernoulli",
            "gbm",
            "diffusion",
        ):
            raise ValueError(f"unknown seed kind {self.kind!r}")
        if self.kind == "line" and self.sigma_xi2 <= 0:
            raise ValueError("line seed needs sigma_xi2 > 0")
        if self.kind == "diffusion" and self.volatility is None:
            raise ValueError("diffusion seed needs a volatility function")

    # -- classification ---------------------------------------------------

    @property
    def is_jump(self) -> bool:
        return self.kind in JUMP_KINDS

    @property
    def is_mean_zero(self) -> bool:
        return self.kind in MEAN_ZERO_KINDS

    @property
    def has_independent_increments(self) -> bool:
        """True for Levy seeds; enables exact aggregation of the infinite past."""
        return self.kind in ("bm", "poisson")

    def _check_domain(self, u) -> None:
        arr = np.atleast_1d(np.asarray(u, dtype=float))
        if self.kind == "line":
            return  # defined on all of R
        if np.any(arr < 0):
            raise SeedDomainError(f"{self.kind} seed requires u >= 0")
        if self.kind == "bernoulli" and np.any(arr > 1):
            raise SeedDomainError("bernoulli seed requires u <= 1 (U ~ Uniform[0,1])")

    # -- analytic moments --------------------------------------------------

    def mean(self, u: float) -> float:
        """mu(u) = E gamma(u)."""
        self._check_domain(u)
        if self.kind == "poisson":
            return float(u)
        if self.kind == "mixed-poisson":
            return float(u) * self.mixing.mean
        if self.kind == "bernoulli":
            return float(u)
        return 0.0  # line, bm, gbm, diffusion are centered

    def variance(self, u: float) -> float:
        """g(u) = Var gamma(u)."""
        self._check_domain(u)
        u = float(u)
        if self.kind == "line":
            return self.sigma_xi2 * u * u
        if self.kind in ("bm", "poisson"):
            return u
        if self.kind == "mixed-poisson":
            mx = self.mixing
            return u * mx.mean + u * u * mx.variance
        if self.kind == "bernoulli":
            return u * (1.0 - u)
        if self.kind == "gbm":
            return math.expm1(u)
        # diffusion: integral of b^2 over [0, u]
        val, _err = quad(lambda v: self.volatility(v) ** 2, 0.0, u, limit=200)
        return val

    def covariance(self, u: float, v: float) -> float:
        """rho(u, v) = Cov(gamma(u), gamma(v)); symmetric, rho(u, u) = g(u)."""
        self._check_domain(u)
        self._check_domain(v)
        u, v = float(u), float(v)
        lo = min(u, v)
        if self.kind == "line":
            return self.sigma_xi2 * u * v
        if self.kind in ("bm", "poisson"):
            return lo
        if self.kind == "mixed-poisson":
            mx = self.mixing
            return lo * mx.mean + u * v * mx.variance
        if self.kind == "bernoulli":
            return lo - u * v
        if self.kind == "gbm":
            return math.expm1(lo)
        return self.variance(lo)  # diffusion: rho(u, v) = g(u ^ v)

    def mean_slope(self) -> float:
        """Coefficient c in mu(u) = c*u; exact for every built-in family."""
        if self.kind in ("poisson", "bernoulli"):
            return 1.0
        if self.kind == "mixed-poisson":
            return self.mixing.mean
        return 0.0

    def variance_slope(self) -> float:
        """Coefficient c with g(u) <= c*u for small u (linear-growth constant)."""
        if self.kind == "line":
            return 0.0  # quadratic, strictly dominated by u near 0
        if self.kind == "mixed-poisson":
            return self.mixing.mean  # plus O(u^2) term handled by callers
        if self.kind == "diffusion":
            hi, _ = quad(lambda v: self.volatility(v) ** 2, 0.0, 1.0, limit=200)
            return max(hi, 1.0)
        return 1.0  # bm, poisson, bernoulli (<= u), gbm near 0 handled separately

    # -- sampling ----------------------------------------------------------

    def sample_path(self, args: Sequence[float], rng: np.random.Generator) -> np.ndarray:
        """One consistent realization of gamma evaluated at sorted ``args``.

        ``args`` must be nondecreasing (duplicates fine).  Returns an array of
        the same length; evaluation at 0 is exactly 0.
        """
        args = np.asarray(args, dtype=float)
        if args.size == 0:
            return np.empty(0)
        if np.any(np.diff(args) < 0):
            raise ValueError("args must be sorted ascending")
        self._check_domain(args)

        if self.kind == "line":
            xi = rng.normal(0.0, math.sqrt(self.sigma_xi2))
            return xi * args

        if self.kind == "bernoulli":
            u0 = rng.random()
            return (args >= u0).astype(float)

        if self.kind in ("poisson", "mixed-poisson"):
            rate = 1.0 if self.kind == "poisson" else float(self.mixing.sample(rng))
            horizon = float(args[-1])
            count = rng.poisson(rate * horizon) if horizon > 0 else 0
            times = np.sort(rng.random(count) * horizon)
            return np.searchsorted(times, args, side="right").astype(float)

        if self.kind in ("bm", "gbm"):
            uniq, inverse = np.unique(args, return_inverse=True)
            increments = np.sqrt(np.diff(np.concatenate(([0.0], uniq))))
            b = np.cumsum(increments * rng.standard_normal(uniq.size))
            if uniq[0] == 0.0:
                b[0] = 0.0
            vals = b if self.kind == "bm" else np.expm1(b - uniq / 2.0)
            out = vals[inverse]
            out[args == 0.0] = 0.0
            return out

        # diffusion: Euler scheme, path read at nearest grid point
        horizon = float(args[-1])
        if horizon == 0.0:
            return np.zeros_like(args)
        h = self.euler_step if self.euler_step else 1e-4 * horizon
        ngrid = max(2, int(math.ceil(horizon / h)) + 1)
        grid = np.linspace(0.0, horizon, ngrid)
        db = rng.standard_normal(ngrid - 1) * math.sqrt(grid[1] - grid[0])
        bvals = np.array([self.volatility(t) for t in grid[:-1]])
        path = np.concatenate(([0.0], np.cumsum(bvals * db)))
        idx = np.clip(np.rint(args / (grid[1] - grid[0])).astype(int), 0, ngrid - 1)
        out = path[idx]
        out[args == 0.0] = 0.0
        return out

    def sample_jump_times(self, horizon: float, rng: np.random.Generator) -> np.ndarray:
        """Jump times tau_i <= horizon of one realization (jump kinds only).

        Poisson inter-arrivals are i.i.d. exponential; the Bernoulli seed has a
        single jump at U (tau_2 = infinity); mixed Poisson scales the rate by
        one draw of the mixing variable.
        """
        if not self.is_jump:
            raise UnsupportedSeedOperation(f"{self.kind} seed has no jump times")
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.kind == "bernoulli":
            u0 = rng.random()
            return np.array([u0]) if u0 <= horizon else np.empty(0)
        rate = 1.0 if self.kind == "poisson" else float(self.mixing.sample(rng))
        times = []
        t = rng.exponential(1.0 / rate)
        while t <= horizon:
            times.append(t)
            t += rng.exponential(1.0 / rate)
        return np.asarray(times)

    # -- config ------------------------------------------------------------

    @classmethod
    def from_config(cls, cfg: dict) -> "SeedModel":
        """Build from a config mapping, e.g. ``{"kind": "poisson"}``."""
        kind = cfg["kind"]
        if kind == "line":
            return cls(kind="line", sigma_xi2=float(cfg.get("sigma_xi2", 1.0)))
        if kind == "mixed-poisson":
            mixing = cfg.get("mixing", {"kind": "exponential", "rate": 1.0})
            if isinstance(mixing, dict):
                mixing = MixingLaw.from_config(mixing)
            return cls(kind="mixed-poisson", mixing=mixing)
        if kind == "diffusion":
            # config files cannot carry callables; accept a constant volatility
            level = float(cfg.get("volatility", 1.0))
            return cls(
                kind="diffusion",
                volatility=lambda v, _c=level: _c,
                euler_step=cfg.get("h"),
            )
        return cls(kind=kind)

    def to_config(self) -> dict:
        cfg: dict = {"kind": self.kind}
        if self.kind == "line":
            cfg["sigma_xi2"] = self.sigma_xi2
        if self.kind == "mixed-poisson":
            cfg["mixing"] = {
                "kind": self.mixing.kind,
                "rate": self.mixing.rate,
                "value": self.mixing.value,
            }
        if self.kind == "diffusion" and self.euler_step:
            cfg["h"] = self.euler_step
        return cfg


# -- module-level operation aliases (the public verbs) ----------------------


def seed_mean(seed: SeedModel, u: float) -> float:
    return seed.mean(u)


def seed_variance(seed: SeedModel, u: float) -> float:
    return seed.variance(u)


def seed_covariance(seed: SeedModel, u: float, v: float) -> float:
    return seed.covariance(u, v)


def sample_seed_path(seed: SeedModel, args, rng: np.random.Generator) -> np.ndarray:
    return seed.sample_path(args, rng)


def sample_jump_times(seed: SeedModel, horizon: float, rng: np.random.Generator) -> np.ndarray:
    return seed.sample_jump_times(horizon, rng)
