"""trawlkit: simulation and verification of discrete-time trawl processes.

The process is X_k = sum_j gamma_{k-j}(a_j) built from i.i.d. seed-process
copies evaluated at trawl heights a_j.  The package simulates it exactly where
the structure allows, computes the analytic moments and asymptotic constants,
and runs Monte Carlo experiments checking the Gaussian and stable partial-sum
limits at desk scale.
"""

from .seeds import (
    MixingLaw,
    SeedDomainError,
    SeedModel,
    UnsupportedSeedOperation,
    sample_jump_times,
    sample_seed_path,
    seed_covariance,
    seed_mean,
    seed_variance,
)
from .trawl import (
    DivergentSeriesError,
    TrawlSequence,
    condition_report,
    tail_mean_sum,
    tail_variance_sum,
    trawl_value,
)
from .theory import (
    TheoryReport,
    ToleranceNotReached,
    asymptotic_constants,
    autocovariance_curve,
    fbm_covariance,
    sigma_squared,
    stable_charfn,
    theory_report,
    trawl_autocovariance,
    trawl_mean,
)
from .simulate import (
    Decomposition,
    SimOptions,
    TrawlPath,
    choose_past_horizon,
    replica_rng,
    sample_Z,
    simulate_decomposition,
    simulate_path,
)
from .stats import (
    empirical_charfn,
    ks_statistic,
    partial_sum_variance,
    sample_autocovariance,
    sample_autocovariance_curve,
    scaling_exponent_fit,
    tail_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "MixingLaw",
    "SeedModel",
    "SeedDomainError",
    "UnsupportedSeedOperation",
    "TrawlSequence",
    "DivergentSeriesError",
    "TheoryReport",
    "ToleranceNotReached",
    "SimOptions",
    "TrawlPath",
    "Decomposition",
    "seed_mean",
    "seed_variance",
    "seed_covariance",
    "sample_seed_path",
    "sample_jump_times",
    "trawl_value",
    "tail_mean_sum",
    "tail_variance_sum",
    "condition_report",
    "trawl_mean",
    "trawl_autocovariance",
    "autocovariance_curve",
    "asymptotic_constants",
    "sigma_squared",
    "fbm_covariance",
    "stable_charfn",
    "theory_report",
    "choose_past_horizon",
    "simulate_path",
    "simulate_decomposition",
    "sample_Z",
    "replica_rng",
    "sample_autocovariance",
    "sample_autocovariance_curve",
    "partial_sum_variance",
    "scaling_exponent_fit",
    "empirical_charfn",
    "ks_statistic",
    "tail_ratio",
]
