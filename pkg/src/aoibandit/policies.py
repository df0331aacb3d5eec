"""Request policies: the adaptive-reset block learner plus baselines.

Every policy instance serves exactly one (client, server) pair and sees only
local observables. The oracle baseline is the deliberate exception: it holds a
read-only view of the full world state and exists as a centralized benchmark.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .adwin import AdwinWindow, DetectorConfig

MONITOR_PREV = "monitor_prev"
MONITOR_CURR = "monitor_curr"
LEARN = "learn"


@dataclass(slots=True)
class PolicyObservation:
    """Local observables handed to a policy when its pair issues a request."""

    t: int
    own_ages: list
    last_arm: int | None = None
    last_raw_reward: float | None = None


class RequestPolicy:
    """Interface: select an AN on request slots, observe the resulting reward."""

    def select(self, obs: PolicyObservation) -> int:
        raise NotImplementedError

    def observe(self, arm: int, raw_reward: float) -> bool:
        """Feed back the raw reward; returns True if the learner reset itself."""
        return False

    def skip_slot(self) -> None:
        """Called instead of select/observe on slots with no request."""


# --- block schedule -------------------------------------------------------

def block_bounds(l: int, num_arms: int, monitor_n: int) -> tuple[int, int]:
    """Local-slot range of block l: ((2^(l-1)-1)KN + 1, (2^l - 1)KN)."""
    kn = num_arms * monitor_n
    return ((2 ** (l - 1) - 1) * kn + 1, (2 ** l - 1) * kn)


def classify_slot(t_local: int, l: int, num_arms: int, monitor_n: int) -> str:
    """Monitoring/learning role of a local slot inside block l (if/elif order)."""
    if l >= 2 and t_local % num_arms == 0:
        return MONITOR_PREV
    if (l >= 2 and t_local % num_arms == 1
            and t_local >= (2 ** l - 2) * num_arms * monitor_n + 1):
        return MONITOR_CURR
    return LEARN


def ucb_select(means: list, counts: list, t_local: int) -> int:
    """argmax of mean + sqrt(2 log(t)/count); unseen arms win, lowest index first."""
    best, best_val = 0, -math.inf
    two_log_t = 2.0 * math.log(t_local)
    for k, c in enumerate(counts):
        if c == 0:
            return k
        val = means[k] + math.sqrt(two_log_t / c)
        if val > best_val:
            best, best_val = k, val
    return best


def select_monitoring_arm(nonmonitor_counts: list) -> int:
    """Most frequently chosen arm during non-monitoring rounds (lowest index on ties)."""
    best, best_c = 0, nonmonitor_counts[0]
    for k in range(1, len(nonmonitor_counts)):
        if nonmonitor_counts[k] > best_c:
            best, best_c = k, nonmonitor_counts[k]
    return best


# --- adaptive-reset block learner ------------------------------------------

@dataclass
class AbarConfig:
    monitor_n: int = 16
    delta: float | None = None        # None: 1 / T_eff^delta_exponent, recomputed per reset
    delta_exponent: float = 3.0
    reward_cap: float = 5.0
    min_subwindow: int = 1
    scan_stride: int = 1
    check_interval: int = 1
    monitor_counts_in_ucb: bool = True


class AbarPolicy(RequestPolicy):
    """UCB learner with a dyadic monitoring schedule and detection-triggered reset.

    Local time advances every wall-clock slot (request or not) so the block
    arithmetic stays aligned; statistics only move on observed rewards. A
    detection discards everything and restarts block 1 against the remaining
    horizon.
    """

    def __init__(self, num_arms: int, horizon: int, cfg: AbarConfig | None = None):
        self.K = int(num_arms)
        self.cfg = cfg or AbarConfig()
        self.N = self.cfg.monitor_n
        self.T_eff = int(horizon)
        self.detector = AdwinWindow(self.K, DetectorConfig(
            delta=self._current_delta(),
            scale=self.cfg.reward_cap,
            min_subwindow=self.cfg.min_subwindow,
            scan_stride=self.cfg.scan_stride,
            check_interval=self.cfg.check_interval,
        ))
        self.last_reset_t_local: int | None = None
        self.n_resets = 0
        self._restart()

    def _current_delta(self) -> float:
        if self.cfg.delta is not None:
            return self.cfg.delta
        return 1.0 / max(self.T_eff, 2) ** self.cfg.delta_exponent

    def _restart(self):
        self.t_local = 0
        self.block = 1
        self._block_last = self.K * self.N
        self.i_prev: int | None = None
        self.i_curr: int | None = None
        self.means = [0.0] * self.K
        self.counts = [0] * self.K
        self.nonmon = [0] * self.K
        self._monitor_round = False

    def _tick(self):
        self.t_local += 1
        while self.t_local > self._block_last:
            self.block += 1
            self._block_last = (2 ** self.block - 1) * self.K * self.N
            # block rollover: current block's monitoring arm becomes "previous";
            # i_curr carries forward until the next election
            self.i_prev = self.i_curr

    def _maybe_elect(self):
        t, kn = self.t_local, self.K * self.N
        if t == kn or (self.block >= 2 and t == (2 ** self.block - 2) * kn):
            self.i_curr = select_monitoring_arm(self.nonmon)

    def select(self, obs: PolicyObservation) -> int:
        self._tick()
        role = classify_slot(self.t_local, self.block, self.K, self.N)
        if role == MONITOR_PREV and self.i_prev is not None:
            self._monitor_round = True
            return self.i_prev
        if role == MONITOR_CURR and self.i_curr is not None:
            self._monitor_round = True
            return self.i_curr
        self._monitor_round = False
        arm = ucb_select(self.means, self.counts, max(self.t_local, 1))
        self.nonmon[arm] += 1
        return arm

    def observe(self, arm: int, raw_reward: float) -> bool:
        if self.cfg.monitor_counts_in_ucb or not self._monitor_round:
            v = self.detector.normalize(raw_reward)
            c = self.counts[arm]
            self.means[arm] = (self.means[arm] * c + v) / (c + 1)
            self.counts[arm] = c + 1
        if self.detector.insert_and_check(arm, raw_reward):
            self.last_reset_t_local = self.t_local
            self.T_eff = max(self.T_eff - self.t_local, 1)
            self._restart()
            self.detector.cfg.delta = self._current_delta()
            self.detector.reset()
            self.n_resets += 1
            return True
        self._maybe_elect()
        return False

    def skip_slot(self) -> None:
        self._tick()
        self._maybe_elect()


# --- baselines --------------------------------------------------------------

class DiscountedUcbPolicy(RequestPolicy):
    """UCB over geometrically discounted sums and counts."""

    def __init__(self, num_arms: int, horizon: int, gamma_d: float | None = None,
                 xi: float = 0.6, reward_cap: float = 5.0):
        self.K = int(num_arms)
        self.gamma_d = (1.0 - 1.0 / (4.0 * math.sqrt(horizon))
                        if gamma_d is None else float(gamma_d))
        self.xi = xi
        self.cap = reward_cap
        self.sums = [0.0] * self.K
        self.counts = [0.0] * self.K

    def select(self, obs: PolicyObservation) -> int:
        n_t = sum(self.counts)
        best, best_val = 0, -math.inf
        log_n = math.log(n_t) if n_t > 1.0 else 0.0
        for k in range(self.K):
            c = self.counts[k]
            if c <= 0.0:
                return k
            val = self.sums[k] / c + 2.0 * math.sqrt(self.xi * log_n / c)
            if val > best_val:
                best, best_val = k, val
        return best

    def observe(self, arm: int, raw_reward: float) -> bool:
        v = min(max(raw_reward / self.cap, 0.0), 1.0)
        g = self.gamma_d
        for k in range(self.K):
            self.sums[k] *= g
            self.counts[k] *= g
        self.sums[arm] += v
        self.counts[arm] += 1.0
        return False


class SlidingWindowUcbPolicy(RequestPolicy):
    """UCB over the most recent tau observations only."""

    def __init__(self, num_arms: int, horizon: int, tau: int | None = None,
                 xi: float = 0.6, reward_cap: float = 5.0):
        self.K = int(num_arms)
        self.tau = (math.ceil(4.0 * math.sqrt(horizon * math.log(horizon)))
                    if tau is None else int(tau))
        self.xi = xi
        self.cap = reward_cap
        self.window: list[tuple[int, float]] = []
        self._start = 0               # deque head; compacted lazily
        self.sums = [0.0] * self.K
        self.counts = [0] * self.K
        self.t_obs = 0

    def select(self, obs: PolicyObservation) -> int:
        best, best_val = 0, -math.inf
        log_t = math.log(max(min(self.t_obs, self.tau), 2))
        for k in range(self.K):
            c = self.counts[k]
            if c == 0:
                return k
            val = self.sums[k] / c + 2.0 * math.sqrt(self.xi * log_t / c)
            if val > best_val:
                best, best_val = k, val
        return best

    def observe(self, arm: int, raw_reward: float) -> bool:
        v = min(max(raw_reward / self.cap, 0.0), 1.0)
        self.window.append((arm, v))
        self.sums[arm] += v
        self.counts[arm] += 1
        self.t_obs += 1
        if len(self.window) - self._start > self.tau:
            old_arm, old_v = self.window[self._start]
            self.sums[old_arm] -= old_v
            self.counts[old_arm] -= 1
            self._start += 1
            if self._start > self.tau:
                del self.window[:self._start]
                self._start = 0
        return False


class OraclePolicy(RequestPolicy):
    """Centralized benchmark: full world visibility, picks the best expected reward."""

    def __init__(self, world, cfg, j: int, p: int):
        self.world = world
        self.cfg = cfg
        self.j = j
        self.p = p

    def select(self, obs: PolicyObservation) -> int:
        hjp = self.world.client_age[self.j][self.p]
        g = self.world.an_age
        r = self.cfg.update_prob
        p = self.p
        best, best_val = 0, -math.inf
        for k in range(self.cfg.num_ans):
            val = hjp - (1.0 - r[k][p]) * min(hjp, g[k][p])
            if val > best_val:
                best, best_val = k, val
        return best


class RandomPolicy(RequestPolicy):
    """Uniform arm choice; sanity baseline."""

    def __init__(self, num_arms: int, seed: int):
        self.K = int(num_arms)
        self.rng = random.Random(seed)

    def select(self, obs: PolicyObservation) -> int:
        return self.rng.randrange(self.K)


def random_select(rng: random.Random, num_arms: int) -> int:
    return rng.randrange(num_arms)
