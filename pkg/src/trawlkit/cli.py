"""Command-line front end: simulate paths, print theory, run experiments.

Seed and trawl specs are inline tags like ``poisson`` or
``power-law:c0=1,alpha=1.5``; experiments read a JSON config file.  Exit
codes: 0 all criteria pass, 1 any criterion fails, 2 invalid configuration.
All file output is written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .experiments import (
    ConfigError,
    ExperimentConfig,
    atomic_write_text,
    run_experiment,
)
from .seeds import SeedModel
from .simulate import SimOptions, simulate_path
from .stats import sample_autocovariance_curve
from .theory import theory_report, trawl_autocovariance, trawl_mean
from .trawl import TrawlSequence, condition_report

ENV_MASTER_SEED = "TRAWLKIT_MASTER_SEED"


def _parse_kv(body: str) -> dict:
    out = {}
    if not body:
        return out
    for item in body.split(","):
        if not item:
            continue
        key, _, value = item.partition("=")
        if not _:
            raise ConfigError(f"expected key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def parse_seed_spec(spec: str) -> SeedModel:
    """``tag`` or ``tag:key=value,...`` -> SeedModel."""
    tag, _, body = spec.partition(":")
    kv = _parse_kv(body)
    try:
        if tag == "line":
            return SeedModel.from_config({"kind": "line", "sigma_xi2": float(kv.get("sigma_xi2", 1.0))})
        if tag == "mixed-poisson":
            mixing = {"kind": kv.get("mixing", "exponential")}
            if "rate" in kv:
                mixing["rate"] = float(kv["rate"])
            if "value" in kv:
                mixing["value"] = float(kv["value"])
            return SeedModel.from_config({"kind": "mixed-poisson", "mixing": mixing})
        if tag == "diffusion":
            cfg = {"kind": "diffusion", "volatility": float(kv.get("volatility", 1.0))}
            if "h" in kv:
                cfg["h"] = float(kv["h"])
            return SeedModel.from_config(cfg)
        if tag in ("bm", "poisson", "bernoulli", "gbm"):
            return SeedModel.from_config({"kind": tag})
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad seed spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown seed tag {tag!r}")


def parse_trawl_spec(spec: str) -> TrawlSequence:
    """``power-law:c0=1,alpha=1.5`` | ``geometric:a=0.5`` | ``custom:values=v|v|v``."""
    tag, _, body = spec.partition(":")
    kv = _parse_kv(body)
    try:
        if tag == "power-law":
            return TrawlSequence.from_config(
                {"kind": tag, "c0": float(kv.get("c0", 1.0)), "alpha": float(kv["alpha"])}
            )
        if tag == "geometric":
            return TrawlSequence.from_config({"kind": tag, "a": float(kv["a"])})
        if tag == "custom":
            values = [float(v) for v in kv["values"].split("|")]
            return TrawlSequence.from_config({"kind": tag, "values": values})
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad trawl spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown trawl tag {tag!r}")


def _master_seed(args) -> int:
    if args.master_seed is not None:
        return args.master_seed
    env = os.environ.get(ENV_MASTER_SEED)
    if env is not None:
        return int(env)
    return 0


def _cmd_simulate(args) -> int:
    seed = parse_seed_spec(args.seed)
    trawl = parse_trawl_spec(args.trawl)
    opts = SimOptions(
        master_seed=_master_seed(args),
        replica_index=args.replica,
        truncation_tol=args.truncation_tol,
    )
    path = simulate_path(seed, trawl, args.n, opts)
    integer = seed.is_jump
    lines = ["k,x"]
    for k, x in enumerate(path.values, start=1):
        lines.append(f"{k},{int(x)}" if integer else f"{k},{x!r}")
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    sidecar = {
        "seed_model": seed.to_config(),
        "trawl": trawl.to_config(),
        "n": args.n,
        "master_seed": opts.master_seed,
        "replica_index": opts.replica_index,
        "theoretical_mean": path.theoretical_mean,
        "past_horizon_used": path.past_horizon_used,
        "truncation_mean_bound": path.truncation_mean_bound,
    }
    atomic_write_text(args.out + ".json", json.dumps(sidecar, indent=2) + "\n")
    return 0


def _cmd_theory(args) -> int:
    seed = parse_seed_spec(args.seed)
    trawl = parse_trawl_spec(args.trawl)
    report = theory_report(seed, trawl, max_lag=args.max_lag, tol=args.tol)
    print(report.to_json())
    return 0


def _cmd_acf(args) -> int:
    seed = parse_seed_spec(args.seed)
    trawl = parse_trawl_spec(args.trawl)
    opts = SimOptions(
        master_seed=_master_seed(args),
        replica_index=args.replica,
        truncation_tol=args.truncation_tol,
    )
    path = simulate_path(seed, trawl, args.n, opts)
    mean = trawl_mean(seed, trawl)
    emp = sample_autocovariance_curve(path.values, args.max_lag, mean=mean)
    lines = ["lag,empirical,analytic"]
    for k in range(args.max_lag + 1):
        theo = trawl_autocovariance(seed, trawl, k)
        lines.append(f"{k},{emp[k]!r},{theo!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_conditions(args) -> int:
    seed = parse_seed_spec(args.seed)
    trawl = parse_trawl_spec(args.trawl)
    print(json.dumps(condition_report(seed, trawl), indent=2))
    return 0


def _cmd_experiment(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config!r}: {exc}") from exc
    if args.workers is not None:
        if "workers" in raw and int(raw["workers"]) != args.workers:
            print(
                f"warning: config workers={raw['workers']} overrides --workers={args.workers}",
                file=sys.stderr,
            )
        else:
            raw["workers"] = args.workers
    cfg = ExperimentConfig.from_dict(raw)
    report = run_experiment(cfg)
    print(report.to_json())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trawlkit",
        description="Simulate long-memory trawl processes and verify their limit theorems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pair(p):
        p.add_argument("--seed", required=True, help="seed tag, e.g. poisson or power-law params")
        p.add_argument("--trawl", required=True, help="trawl tag, e.g. power-law:c0=1,alpha=1.5")

    p_sim = sub.add_parser("simulate", help="simulate one path to CSV plus a JSON sidecar")
    add_pair(p_sim)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--master-seed", type=int, default=None, dest="master_seed")
    p_sim.add_argument("--replica", type=int, default=0)
    p_sim.add_argument("--truncation-tol", type=float, default=1e-3, dest="truncation_tol")
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_theory = sub.add_parser("theory", help="print the analytic report as JSON")
    add_pair(p_theory)
    p_theory.add_argument("--max-lag", type=int, default=20, dest="max_lag")
    p_theory.add_argument("--tol", type=float, default=1e-10)
    p_theory.set_defaults(func=_cmd_theory)

    p_acf = sub.add_parser("acf", help="empirical vs analytic autocovariances of one path")
    add_pair(p_acf)
    p_acf.add_argument("--n", type=int, required=True)
    p_acf.add_argument("--max-lag", type=int, default=50, dest="max_lag")
    p_acf.add_argument("--master-seed", type=int, default=None, dest="master_seed")
    p_acf.add_argument("--replica", type=int, default=0)
    p_acf.add_argument("--truncation-tol", type=float, default=1e-3, dest="truncation_tol")
    p_acf.add_argument("--out", default=None)
    p_acf.set_defaults(func=_cmd_acf)

    p_cond = sub.add_parser("conditions", help="summability conditions and memory regime")
    add_pair(p_cond)
    p_cond.set_defaults(func=_cmd_conditions)

    p_exp = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--workers", type=int, default=None)
    p_exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help; keep its codes
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
