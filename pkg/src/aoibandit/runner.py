"""Experiment runner: seeded simulations, per-run summaries, CSV output."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .config import NetworkConfig, validate_config
from .metrics import ResetEvent, RunLog, cumulative_regret, export_csv
from .policies import (AbarConfig, AbarPolicy, DiscountedUcbPolicy,
                       OraclePolicy, RandomPolicy, SlidingWindowUcbPolicy)
from .scenarios import ScenarioPreset, builtin_scenarios
from .simcore import EnvDraws, initial_state, step_slot

POLICY_IDS = ("abar", "ducb", "swucb", "oracle", "random")


class UnknownPolicy(KeyError):
    pass


class UnknownScenario(KeyError):
    pass


@dataclass
class PolicyParams:
    """Hyperparameters shared by a batch of runs.

    The detector's scan_stride/check_interval defaults here are experiment
    defaults chosen to keep long stationary runs tractable; the detector's own
    defaults (1/1) implement the exact every-split, every-insertion rule.
    """

    monitor_n: int = 16
    delta: float | None = None        # None: 1 / T_eff^delta_exp
    delta_exp: float = 3.0
    reward_cap: float | None = None   # None: take the scenario config's cap
    adwin_stride: int = 8
    adwin_check_interval: int = 64
    ducb_gamma: float | None = None   # None: 1 - 1/(4 sqrt(T))
    ducb_xi: float = 0.6
    sw_tau: int | None = None         # None: ceil(4 sqrt(T log T))
    sw_xi: float = 0.6


@dataclass
class RunSpec:
    scenario: str
    seeds: list
    horizon: int | None = None
    out_dir: str | None = None
    policies: list | None = None      # None: the scenario's roster
    params: PolicyParams = field(default_factory=PolicyParams)
    record_ages: bool = False


@dataclass
class RunSummary:
    policy: str
    seed: int
    horizon: int
    final_avg_aoi: float
    final_cum_regret: float
    # regret rates R(T/4)/(T/4), R(T/2)/(T/2), R(T)/T
    regret_checkpoints: tuple = ()
    n_resets: int = 0


def make_policy(policy_id: str, cfg: NetworkConfig, world, j: int, p: int,
                seedseq, params: PolicyParams):
    K, T = cfg.num_ans, cfg.horizon
    cap = params.reward_cap if params.reward_cap is not None else cfg.reward_cap
    if policy_id == "abar":
        return AbarPolicy(K, T, AbarConfig(
            monitor_n=params.monitor_n, delta=params.delta,
            delta_exponent=params.delta_exp, reward_cap=cap,
            scan_stride=params.adwin_stride,
            check_interval=params.adwin_check_interval))
    if policy_id == "ducb":
        return DiscountedUcbPolicy(K, T, gamma_d=params.ducb_gamma,
                                   xi=params.ducb_xi, reward_cap=cap)
    if policy_id == "swucb":
        return SlidingWindowUcbPolicy(K, T, tau=params.sw_tau,
                                      xi=params.sw_xi, reward_cap=cap)
    if policy_id == "oracle":
        return OraclePolicy(world, cfg, j, p)
    if policy_id == "random":
        return RandomPolicy(K, int(seedseq.generate_state(1)[0]))
    raise UnknownPolicy(policy_id)


def run_simulation(cfg: NetworkConfig, policy_id: str, seed: int,
                   params: PolicyParams | None = None, *,
                   horizon: int | None = None, r_switch=None,
                   record_ages: bool = True, record_mu: bool = False) -> RunLog:
    """One full seeded run of one policy against the environment."""
    params = params or PolicyParams()
    cfg = replace(cfg, seed=seed,
                  horizon=horizon if horizon is not None else cfg.horizon)
    validate_config(cfg)
    if r_switch is not None:
        switch_slot = int(r_switch[0])
        switch_r = validate_config(replace(cfg, update_prob=r_switch[1])).update_prob
    T, J, P, K = cfg.horizon, cfg.num_clients, cfg.num_servers, cfg.num_ans
    env = EnvDraws(cfg)
    state = initial_state(cfg)
    policies = [[make_policy(policy_id, cfg, state, j, p,
                             env.policy_seed(j, p, seed), params)
                 for p in range(P)] for j in range(J)]

    # flat row-major per-slot logs; reshaped to (T, J, P) arrays at the end
    mean_aoi: list[float] = []
    rewards_flat: list[int] = []
    regret_flat: list[float] = []
    chosen_flat: list[int] = []
    ages_flat: list[int] = []
    mu_table = np.zeros((T, J, P, K)) if record_mu else None
    resets: list[ResetEvent] = []

    pairs = [(j, p) for j in range(J) for p in range(P)]
    n_pairs = float(len(pairs))
    for t in range(T):
        if r_switch is not None and t == switch_slot:
            cfg.update_prob = switch_r
        r = cfg.update_prob
        outcome = step_slot(cfg, state, policies, env)
        aoi_sum = 0
        h_post = state.client_age
        for j, p in pairs:
            k = outcome.chosen_arm[j][p]
            rewards_flat.append(outcome.rewards[j][p])
            chosen_flat.append(k)
            hpre = outcome.pre_h[j][p]
            g_pre = outcome.pre_g
            best = -math.inf
            chosen_val = 0.0
            for kk in range(K):
                val = hpre - (1.0 - r[kk][p]) * min(hpre, g_pre[kk][p])
                if val > best:
                    best = val
                if kk == k:
                    chosen_val = val
                if mu_table is not None:
                    mu_table[t, j, p, kk] = val
            regret_flat.append(best - chosen_val if k >= 0 else 0.0)
            aoi_sum += h_post[j][p]
            if record_ages:
                ages_flat.append(h_post[j][p])
        mean_aoi.append(aoi_sum / n_pairs)
        for j, p in outcome.resets:
            resets.append(ResetEvent(
                slot=t, j=j, p=p,
                t_local=policies[j][p].last_reset_t_local or 0))
    ages = None
    if record_ages:
        ages = np.ones((T + 1, J, P), dtype=np.int64)
        ages[1:] = np.array(ages_flat, dtype=np.int64).reshape(T, J, P)
    return RunLog(policy=policy_id, seed=seed, config=cfg,
                  mean_aoi=np.array(mean_aoi),
                  rewards=np.array(rewards_flat, dtype=np.float64).reshape(T, J, P),
                  regret=np.array(regret_flat, dtype=np.float64).reshape(T, J, P),
                  chosen=np.array(chosen_flat, dtype=np.int16).reshape(T, J, P),
                  client_age=ages, mu_table=mu_table, resets=resets)


def summarize_log(log: RunLog) -> RunSummary:
    cum = cumulative_regret(log)
    T = log.horizon
    cps = tuple(float(cum[max(T // d, 1) - 1] / max(T // d, 1)) for d in (4, 2, 1))
    return RunSummary(policy=log.policy, seed=log.seed, horizon=T,
                      final_avg_aoi=float(np.mean(log.mean_aoi)),
                      final_cum_regret=float(cum[-1]),
                      regret_checkpoints=cps, n_resets=len(log.resets))


def resolve_scenario(name: str) -> ScenarioPreset:
    presets = builtin_scenarios()
    if name not in presets:
        raise UnknownScenario(
            f"unknown scenario {name!r}; known: {', '.join(sorted(presets))}")
    return presets[name]


def run_experiment(spec: RunSpec):
    """Run every (policy, seed) combination; returns a RunSummary list.

    When spec.out_dir is set, each run's series/events CSVs land under
    <out>/<scenario>/<policy>/seed<N>/. Environment substreams depend only on
    (config, seed), so runs with the same seed share identical fetch draws
    across policies.
    """
    preset = resolve_scenario(spec.scenario)
    if not spec.seeds:
        raise ValueError("at least one seed is required")
    policy_ids = list(spec.policies) if spec.policies else list(preset.policies)
    for pid in policy_ids:
        if pid not in POLICY_IDS:
            raise UnknownPolicy(
                f"unknown policy {pid!r}; known: {', '.join(POLICY_IDS)}")
    summaries = []
    for pid in policy_ids:
        for seed in spec.seeds:
            log = run_simulation(preset.config, pid, int(seed), spec.params,
                                 horizon=spec.horizon, r_switch=preset.r_switch,
                                 record_ages=spec.record_ages)
            if spec.out_dir is not None:
                export_csv(log, Path(spec.out_dir) / spec.scenario / pid
                           / f"seed{seed}")
            summaries.append(summarize_log(log))
    return summaries


def summarize(summaries) -> dict:
    """Aggregate per-policy statistics across seeds."""
    if not summaries:
        raise ValueError("no run summaries to aggregate")
    by_policy: dict[str, list[RunSummary]] = {}
    for s in summaries:
        by_policy.setdefault(s.policy, []).append(s)
    table = {}
    for pid, runs in by_policy.items():
        aoi = np.array([r.final_avg_aoi for r in runs])
        reg = np.array([r.final_cum_regret for r in runs])
        cps = np.array([r.regret_checkpoints for r in runs])
        table[pid] = {
            "n_runs": len(runs),
            "aoi_mean": float(aoi.mean()),
            "aoi_std": float(aoi.std()),
            "regret_mean": float(reg.mean()),
            "regret_std": float(reg.std()),
            "regret_rate_quarter": float(cps[:, 0].mean()),
            "regret_rate_half": float(cps[:, 1].mean()),
            "regret_rate_full": float(cps[:, 2].mean()),
            "resets_mean": float(np.mean([r.n_resets for r in runs])),
        }
    return table
