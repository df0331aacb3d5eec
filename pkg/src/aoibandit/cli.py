"""Command-line entry point.

    aoibandit simulate --scenario scenario1 --policy abar,oracle --seeds 10 \
        --horizon 100000 --out results/
    aoibandit list-scenarios
    aoibandit list-policies
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError
from .runner import (POLICY_IDS, PolicyParams, RunSpec, UnknownPolicy,
                     UnknownScenario, run_experiment, summarize)
from .scenarios import DESK_HORIZON, builtin_scenarios


def parse_kv_config(text: str) -> dict:
    """Parse plain key=value lines; '#' comments, commas for arrays,
    semicolons for matrix rows. Values become int/float where possible."""

    def atom(s: str):
        s = s.strip()
        try:
            return int(s)
        except ValueError:
            pass
        try:
            return float(s)
        except ValueError:
            return s

    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if ";" in val:
            out[key] = [[atom(x) for x in row.split(",")] for row in val.split(";")]
        elif "," in val:
            out[key] = [atom(x) for x in val.split(",")]
        else:
            out[key] = atom(val)
    return out


def format_kv_config(values: dict) -> str:
    """Inverse of parse_kv_config for round-trip tests and run provenance."""
    lines = []
    for key, val in values.items():
        if isinstance(val, list) and val and isinstance(val[0], list):
            text = ";".join(",".join(repr(x) for x in row) for row in val)
        elif isinstance(val, list):
            text = ",".join(repr(x) for x in val)
        else:
            text = repr(val) if not isinstance(val, str) else val
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aoibandit")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run seeded policy-vs-environment batches")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--policy", help="comma-separated policy ids "
                                      "(default: the scenario's roster)")
    sim.add_argument("--seeds", type=int, default=10,
                     help="run seeds 0..N-1 (default 10)")
    sim.add_argument("--seed-list", help="explicit comma-separated seeds")
    sim.add_argument("--horizon", type=int,
                     help="slot count (default: desk-scale cap of "
                          f"{DESK_HORIZON}; see --full)")
    sim.add_argument("--full", action="store_true",
                     help="use the scenario's full preset horizon")
    sim.add_argument("--out", default="results")
    sim.add_argument("--monitor-n", type=int, default=16)
    sim.add_argument("--delta-exp", type=float, default=3.0,
                     help="detector confidence delta = 1/T^exp (default 3)")
    sim.add_argument("--reward-cap", type=float)
    sim.add_argument("--adwin-stride", type=int, default=8)
    sim.add_argument("--adwin-check-interval", type=int, default=64)
    sim.add_argument("--ducb-gamma", type=float)
    sim.add_argument("--sw-tau", type=int)
    sim.add_argument("--config", help="key=value overrides file")

    sub.add_parser("list-scenarios", help="print the built-in scenarios")
    sub.add_parser("list-policies", help="print the known policy ids")
    return parser


def _spec_from_args(args) -> RunSpec:
    overrides = {}
    if args.config:
        overrides = parse_kv_config(Path(args.config).read_text())

    def pick(name, cli_value):
        return overrides.get(name, cli_value)

    scenario = pick("scenario", args.scenario)
    if args.seed_list:
        seeds = [int(s) for s in args.seed_list.split(",")]
    else:
        seeds = list(range(int(pick("seeds", args.seeds))))
    if "seed_list" in overrides:
        raw = overrides["seed_list"]
        seeds = [int(s) for s in (raw if isinstance(raw, list) else [raw])]
    horizon = pick("horizon", args.horizon)
    if horizon is None and not args.full:
        preset = builtin_scenarios().get(scenario)
        if preset is not None:
            horizon = min(preset.config.horizon, DESK_HORIZON)
    policies = pick("policies", args.policy)
    if isinstance(policies, str):
        policies = [p.strip() for p in policies.split(",") if p.strip()]
    params = PolicyParams(
        monitor_n=int(pick("monitor_n", args.monitor_n)),
        delta_exp=float(pick("delta_exp", args.delta_exp)),
        reward_cap=pick("reward_cap", args.reward_cap),
        adwin_stride=int(pick("adwin_stride", args.adwin_stride)),
        adwin_check_interval=int(pick("adwin_check_interval",
                                      args.adwin_check_interval)),
        ducb_gamma=pick("ducb_gamma", args.ducb_gamma),
        sw_tau=pick("sw_tau", args.sw_tau),
    )
    return RunSpec(scenario=scenario, seeds=seeds, horizon=horizon,
                   out_dir=str(pick("out", args.out)), policies=policies,
                   params=params)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name, preset in sorted(builtin_scenarios().items()):
                cfg = preset.config
                print(f"{name}: J={cfg.num_clients} K={cfg.num_ans} "
                      f"P={cfg.num_servers} T={cfg.horizon} - {preset.description}")
            return 0
        if args.command == "list-policies":
            for pid in POLICY_IDS:
                print(pid)
            return 0
        spec = _spec_from_args(args)
        summaries = run_experiment(spec)
        table = summarize(summaries)
        print(f"{'policy':<8} {'runs':>4} {'aoi':>10} {'aoi_sd':>8} "
              f"{'regret':>12} {'rate T/4':>10} {'rate T/2':>10} {'rate T':>10}")
        for pid, row in table.items():
            print(f"{pid:<8} {row['n_runs']:>4} {row['aoi_mean']:>10.4f} "
                  f"{row['aoi_std']:>8.4f} {row['regret_mean']:>12.1f} "
                  f"{row['regret_rate_quarter']:>10.5f} "
                  f"{row['regret_rate_half']:>10.5f} "
                  f"{row['regret_rate_full']:>10.5f}")
        return 0
    except (ConfigError, UnknownPolicy, UnknownScenario, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
