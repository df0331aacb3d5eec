"""Run logging, AoI/regret metrics, drift diagnostics, CSV export."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import NetworkConfig


class EmptyLog(ValueError):
    """Metric requested on a log with no slots."""


class MissingMuTable(ValueError):
    """Drift diagnostic requested without a recorded expected-reward table."""


@dataclass
class ResetEvent:
    slot: int
    j: int
    p: int
    t_local: int
    kind: str = "reset"     # refined to "abrupt"/"gradual" by classify_resets


@dataclass
class RunLog:
    """Per-slot time series for one simulation run.

    mean_aoi[t] is the mean client age h(t+1) after slot t executed, i.e. the
    series h(1)..h(T) entering the long-run average. client_age holds the full
    h(t) table for t = 0..T when age recording is enabled. mu_table, when
    recorded, is the per-slot per-arm expected reward (T, J, P, K) evaluated on
    the realized trajectory's pre-update state.
    """

    policy: str
    seed: int
    config: NetworkConfig
    mean_aoi: np.ndarray
    rewards: np.ndarray                 # (T, J, P) raw AoI reductions
    regret: np.ndarray                  # (T, J, P) per-slot pseudo-regret
    chosen: np.ndarray                  # (T, J, P) AN indices, -1 for no request
    client_age: np.ndarray | None = None    # (T+1, J, P)
    mu_table: np.ndarray | None = None
    resets: list = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.mean_aoi)


def average_aoi(log: RunLog) -> float:
    """Time average of the per-slot mean client age."""
    if log.horizon == 0:
        raise EmptyLog("run log has no slots")
    return float(np.mean(log.mean_aoi))


def pseudo_regret_slot(pre_h: list, pre_g: list, update_prob: list,
                       j: int, p: int, chosen: int) -> float:
    """Expected-reward gap between the best arm and the chosen one, pre-update state."""
    if chosen < 0:
        return 0.0
    hjp = pre_h[j][p]
    best = -math.inf
    chosen_val = 0.0
    for k in range(len(update_prob)):
        val = hjp - (1.0 - update_prob[k][p]) * min(hjp, pre_g[k][p])
        if val > best:
            best = val
        if k == chosen:
            chosen_val = val
    return best - chosen_val


def cumulative_regret(log: RunLog) -> np.ndarray:
    """Running sum over slots of the pseudo-regret summed over all pairs."""
    return np.cumsum(log.regret.sum(axis=(1, 2)))


def epsilon_drift(mu: np.ndarray, epoch_starts=(0,)) -> np.ndarray:
    """Per-slot maximum drift max_{s<=t} max_i |mu[i,s] - mu[i,s0]| within each epoch."""
    T = mu.shape[0]
    eps = np.zeros(T)
    starts = sorted(set(int(s) for s in epoch_starts) | {0})
    starts.append(T)
    for a, b in zip(starts[:-1], starts[1:]):
        if a >= T:
            break
        dev = np.abs(mu[a:b] - mu[a]).max(axis=1)
        eps[a:b] = np.maximum.accumulate(dev)
    return eps


def drift_tolerant_regret(mu: np.ndarray, chosen: np.ndarray, c: float,
                          epoch_starts=(0,)) -> float:
    """Sum of (reg(t) - c * eps(t))+ over slots with a request.

    mu is (T, K); chosen is (T,) with -1 on no-request slots, which contribute
    zero regret. With c = 0 (or a stationary table) this is the plain
    cumulative pseudo-regret recomputed from the expected-reward table.
    """
    if mu is None:
        raise MissingMuTable("expected-reward table required")
    mu = np.asarray(mu, dtype=float)
    chosen = np.asarray(chosen)
    eps = epsilon_drift(mu, epoch_starts)
    total = 0.0
    for t in range(mu.shape[0]):
        k = chosen[t]
        if k < 0:
            continue
        reg = mu[t].max() - mu[t, k]
        total += max(reg - c * eps[t], 0.0)
    return float(total)


@dataclass
class ChangePoint:
    slot: int               # change between slot and slot+1
    arms: tuple             # arms whose one-step jump exceeds b
    jumps: tuple            # |mu[t+1] - mu[t]| for those arms
    min_jump: float         # smallest qualifying jump (detectability epsilon)


def classify_changes(mu: np.ndarray, b: float) -> list[ChangePoint]:
    """Slots where some arm's expected reward jumps by more than b."""
    mu = np.asarray(mu, dtype=float)
    out = []
    diffs = np.abs(np.diff(mu, axis=0))
    for t in range(diffs.shape[0]):
        arms = np.nonzero(diffs[t] > b)[0]
        if arms.size:
            jumps = diffs[t, arms]
            out.append(ChangePoint(slot=t, arms=tuple(int(a) for a in arms),
                                   jumps=tuple(float(x) for x in jumps),
                                   min_jump=float(jumps.min())))
    return out


def classify_resets(resets: list, change_slots: list, window: int) -> list:
    """Label each reset abrupt if it falls within `window` slots after a true
    change point, gradual otherwise. Returns new ResetEvent objects."""
    out = []
    for ev in resets:
        kind = "gradual"
        for tc in change_slots:
            if tc < ev.slot <= tc + window:
                kind = "abrupt"
                break
        out.append(ResetEvent(ev.slot, ev.j, ev.p, ev.t_local, kind))
    return out


def detectability_threshold(horizon: int, num_arms: int, monitor_n: int,
                            b: float, u_m: float) -> float:
    """Minimum jump required for guaranteed detection with slack parameter u_m."""
    log_t3 = 3.0 * math.log(horizon)
    return (math.sqrt(log_t3 / (2.0 * u_m))
            + 6.0 * b * num_arms * monitor_n
            + 2.0 * math.sqrt(log_t3 / (2.0 * monitor_n))
            + b)


def detectability_report(changes: list, resets: list, *, horizon: int,
                         num_arms: int, monitor_n: int, b: float,
                         u_values) -> list[dict]:
    """Per change point: jump magnitude vs. threshold, spacing condition, and
    realized detection delay against the 16*K*u bound.

    resets must already carry abrupt/gradual kinds (see classify_resets); the
    slack parameters u_values are supplied by the caller, one per change.
    """
    reports = []
    reset_slots = sorted(ev.slot for ev in resets)
    gradual_slots = sorted(ev.slot for ev in resets if ev.kind == "gradual")
    for cp, u_m in zip(changes, u_values):
        thr = detectability_threshold(horizon, num_arms, monitor_n, b, u_m)
        last_gradual = max((s for s in gradual_slots if s < cp.slot), default=0)
        delay = None
        for s in reset_slots:
            if s > cp.slot:
                delay = s - cp.slot
                break
        reports.append({
            "change_slot": cp.slot,
            "arms": cp.arms,
            "epsilon_m": cp.min_jump,
            "threshold": thr,
            "jump_detectable": cp.min_jump >= thr,
            "spacing_ok": (cp.slot - last_gradual) >= 32 * num_arms * u_m,
            "detection_delay": delay if delay is not None else "undetected",
            "delay_within_bound": (delay is not None
                                   and delay <= 16 * num_arms * u_m),
        })
    return reports


def export_csv(log: RunLog, out_dir) -> None:
    """Write series.csv (t, mean_aoi, cum_regret, resets_so_far) and events.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cum = cumulative_regret(log)
    reset_slots = sorted(ev.slot for ev in log.resets)
    lines = ["t,mean_aoi,cum_regret,resets_so_far"]
    n_resets = 0
    ri = 0
    for t in range(log.horizon):
        while ri < len(reset_slots) and reset_slots[ri] <= t:
            n_resets += 1
            ri += 1
        lines.append(
            f"{t + 1},{float(log.mean_aoi[t])!r},{float(cum[t])!r},{n_resets}")
    (out / "series.csv").write_text("\n".join(lines) + "\n")
    ev_lines = ["slot,pair_j,pair_p,kind"]
    for ev in log.resets:
        ev_lines.append(f"{ev.slot},{ev.j},{ev.p},{ev.kind}")
    (out / "events.csv").write_text("\n".join(ev_lines) + "\n")
