"""Trawl sequences: values, certified tail sums, summability diagnostics.

The trawl is the deterministic nonnegative sequence ``a_j -> 0`` whose decay
rate sets the memory of the process.  The power-law family uses the offset
convention ``a_j = c0 * (j+1)**(-alpha)`` so that ``a_0`` is finite while the
decay exponent is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta

from .seeds import SeedModel


class DivergentSeriesError(ValueError):
    """A requested tail sum does not converge for this configuration."""


@dataclass(frozen=True)
class TrawlSequence:
    """kind is ``power-law`` (c0, alpha), ``geometric`` (a) or ``custom``.

    Custom trawls carry an explicit finite list of values; beyond it the tail
    is zero (``tail_rule="zero"``, the only built-in rule).  ``monotone_from``
    records the index from which the values are nonincreasing; the exact jump
    engine requires monotonicity from 0.
    """

    kind: str
    c0: float = 1.0
    alpha: float = 1.5
    a: float = 0.5
    values: Optional[tuple] = None
    tail_rule: str = "zero"
    monotone_from: Optional[int] = None

    def __post_init__(self):
        if self.kind == "power-law":
            if self.c0 <= 0:
                raise ValueError("power-law trawl needs c0 > 0")
            if not (1.0 < self.alpha < 2.0):
                raise ValueError("power-law trawl needs alpha in (1, 2)")
        elif self.kind == "geometric":
            if not (0.0 < self.a < 1.0):
                raise ValueError("geometric trawl needs a in (0, 1)")
        elif self.kind == "custom":
            if self.values is None or len(self.values) == 0:
                raise ValueError("custom trawl needs a nonempty value list")
            if self.tail_rule != "zero":
                raise ValueError("only the zero tail rule is supported")
            vals = np.asarray(self.values, dtype=float)
            if np.any(vals < 0):
                raise ValueError("trawl values must be nonnegative")
            mono = 0
            diffs = np.diff(np.concatenate((vals, [0.0])))
            bad = np.nonzero(diffs > 0)[0]
            if bad.size:
                mono = int(bad[-1]) + 1
            object.__setattr__(self, "monotone_from", mono)
        else:
            raise ValueError(f"unknown trawl kind {self.kind!r}")

    # -- values --------------------------------------------------------

    def value(self, j: int) -> float:
        """a_j."""
        if j < 0:
            raise ValueError("trawl index must be nonnegative")
        if self.kind == "power-law":
            return self.c0 * (j + 1.0) ** (-self.alpha)
        if self.kind == "geometric":
            return self.a**j
        if j < len(self.values):
            return float(self.values[j])
        return 0.0

    def head(self, count: int) -> np.ndarray:
        """Array [a_0, ..., a_{count-1}]."""
        j = np.arange(count, dtype=float)
        if self.kind == "power-law":
            return self.c0 * (j + 1.0) ** (-self.alpha)
        if self.kind == "geometric":
            return self.a**j
        out = np.zeros(count)
        m = min(count, len(self.values))
        out[:m] = np.asarray(self.values[:m], dtype=float)
        return out

    @property
    def is_monotone(self) -> bool:
        if self.kind in ("power-law", "geometric"):
            return True
        return self.monotone_from == 0

    @property
    def support(self) -> Optional[int]:
        """Number of nonzero values for finite trawls, else None."""
        if self.kind == "custom":
            vals = np.asarray(self.values, dtype=float)
            nz = np.nonzero(vals)[0]
            return int(nz[-1]) + 1 if nz.size else 0
        return None

    # -- tail sums -------------------------------------------------------

    def tail_sum(self, j_from: int) -> float:
        """Exact sum of a_j over j >= j_from.

        Power law: Hurwitz zeta; geometric and custom: closed form.
        """
        if self.kind == "power-law":
            return self.c0 * float(zeta(self.alpha, j_from + 1.0))
        if self.kind == "geometric":
            return self.a**j_from / (1.0 - self.a)
        vals = np.asarray(self.values, dtype=float)
        return float(vals[j_from:].sum()) if j_from < vals.size else 0.0

    def tail_sum_power(self, j_from: int, power: float) -> float:
        """Sum of a_j**power over j >= j_from (may raise if divergent)."""
        if self.kind == "power-law":
            expo = self.alpha * power
            if expo <= 1.0:
                raise DivergentSeriesError(
                    f"sum of a_j^{power} diverges for alpha*power = {expo:.3f} <= 1"
                )
            return self.c0**power * float(zeta(expo, j_from + 1.0))
        if self.kind == "geometric":
            r = self.a**power
            return r**j_from / (1.0 - r)
        vals = np.asarray(self.values, dtype=float)
        return float((vals[j_from:] ** power).sum()) if j_from < vals.size else 0.0

    def weighted_tail_sum(self, j_from: int) -> float:
        """Sum of j * a_j over j >= max(j_from, 1); infinite for power laws."""
        if self.kind == "power-law":
            raise DivergentSeriesError(
                "sum of j*a_j diverges for power-law trawls with alpha < 2"
            )
        lo = max(j_from, 1)
        if self.kind == "geometric":
            a = self.a
            # sum_{j>=lo} j a^j = a^lo (lo + a(1-lo) ... ) closed form
            return a**lo * (lo * (1 - a) + a) / (1 - a) ** 2
        vals = np.asarray(self.values, dtype=float)
        j = np.arange(vals.size, dtype=float)
        return float((j[lo:] * vals[lo:]).sum()) if lo < vals.size else 0.0

    # -- config ----------------------------------------------------------

    @classmethod
    def from_config(cls, cfg: dict) -> "TrawlSequence":
        kind = cfg["kind"]
        if kind == "power-law":
            return cls(kind=kind, c0=float(cfg.get("c0", 1.0)), alpha=float(cfg["alpha"]))
        if kind == "geometric":
            return cls(kind=kind, a=float(cfg["a"]))
        return cls(kind="custom", values=tuple(float(v) for v in cfg["values"]))

    def to_config(self) -> dict:
        if self.kind == "power-law":
            return {"kind": "power-law", "c0": self.c0, "alpha": self.alpha}
        if self.kind == "geometric":
            return {"kind": "geometric", "a": self.a}
        return {"kind": "custom", "values": list(self.values)}


# -- operations --------------------------------------------------------------


def trawl_value(t: TrawlSequence, j: int) -> float:
    return t.value(j)


def tail_mean_sum(seed: SeedModel, t: TrawlSequence, j_from: int) -> float:
    """Upper bound on sum of |mu(a_j)| over j > j_from.

    Every built-in seed has exactly linear mean mu(u) = c*u on its domain, so
    the bound is c times the exact trawl tail.
    """
    if j_from < 0:
        raise ValueError("tail index must be nonnegative")
    c = seed.mean_slope()
    if c == 0.0:
        return 0.0
    return c * t.tail_sum(j_from + 1)


def tail_variance_sum(seed: SeedModel, t: TrawlSequence, j_from: int) -> float:
    """Upper bound on sum of g(a_j) over j > j_from."""
    if j_from < 0:
        raise ValueError("tail index must be nonnegative")
    kind = seed.kind
    if kind == "line":
        return seed.sigma_xi2 * t.tail_sum_power(j_from + 1, 2.0)
    if kind in ("bm", "poisson", "bernoulli"):
        # g(u) <= u for all three (bernoulli: u(1-u) <= u)
        return t.tail_sum(j_from + 1)
    if kind == "mixed-poisson":
        mx = seed.mixing
        return mx.mean * t.tail_sum(j_from + 1) + mx.variance * t.tail_sum_power(
            j_from + 1, 2.0
        )
    if kind == "gbm":
        # expm1(u) <= u * e^{a_max} for u <= a_max over the remaining tail
        if t.kind == "custom":
            vals = np.asarray(t.values, dtype=float)
            a_max = float(vals[j_from + 1 :].max()) if j_from + 1 < vals.size else 0.0
        else:
            a_max = t.value(j_from + 1)
        return float(np.exp(a_max)) * t.tail_sum(j_from + 1)
    # diffusion: g(u) <= sup E b^2 * u
    return seed.variance_slope() * t.tail_sum(j_from + 1)


def condition_report(seed: SeedModel, t: TrawlSequence) -> dict:
    """Analytic summability flags and the memory-regime classification.

    Keys: ``abs_summable`` (sum |a_j|), ``weighted_summable`` (sum j|a_j|),
    ``sqrt_summable`` (sum sqrt(a_j)), ``frac_summable_2_delta``
    (sum a_j^{1/(2+delta)} for delta=1), ``variance_summable`` (sum g(a_j)),
    and ``regime`` in {"long-memory", "short-memory", "undetermined"}.
    """
    if t.kind == "power-law":
        alpha = t.alpha
        flags = {
            "abs_summable": alpha > 1.0,
            "weighted_summable": False,  # needs alpha > 2
            "sqrt_summable": alpha > 2.0,
            "frac_summable_2_delta": alpha > 3.0,
            "regime": "long-memory",
        }
    elif t.kind == "geometric":
        flags = {
            "abs_summable": True,
            "weighted_summable": True,
            "sqrt_summable": True,
            "frac_summable_2_delta": True,
            "regime": "short-memory",
        }
    else:
        # finite custom trawls satisfy every summability condition, but the
        # asymptotic regime dichotomy is about tails, so stay agnostic
        flags = {
            "abs_summable": True,
            "weighted_summable": True,
            "sqrt_summable": True,
            "frac_summable_2_delta": True,
            "regime": "undetermined",
        }
    try:
        flags["variance_summable"] = bool(np.isfinite(tail_variance_sum(seed, t, 0)))
    except DivergentSeriesError:
        flags["variance_summable"] = False
    flags["kind"] = t.kind
    if t.kind == "power-law":
        flags["alpha"] = t.alpha
        flags["c0"] = t.c0
    return flags
