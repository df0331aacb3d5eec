"""Adaptive-windowing change detection over an arm-tagged reward stream.

The window holds (arm, normalized reward) entries. On each check, every
consecutive two-way split of the window is examined; a change is flagged when
some arm's empirical means on the two sides differ by at least the Hoeffding
threshold computed from that arm's per-side sample counts. The scan is the
exact naive rule (no bucket compression); scan_stride and check_interval are
opt-in speedups for long stationary runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit


class ZeroCount(ValueError):
    """epsilon_cut called with an empty subwindow."""


def _rsqrt_table(cap: int) -> np.ndarray:
    """rsqrt[c] = 1/sqrt(c) for c in 0..cap (index 0 unused, set to 0)."""
    table = np.empty(cap + 1)
    table[0] = 0.0
    table[1:] = 1.0 / np.sqrt(np.arange(1, cap + 1, dtype=np.float64))
    return table


@dataclass
class DetectorConfig:
    delta: float
    scale: float = 5.0        # rewards are divided by this and clipped to [0, 1]
    min_subwindow: int = 1    # skip splits where either side has fewer samples of the arm
    scan_stride: int = 1      # check every stride-th split position (1 = all splits)
    check_interval: int = 1   # run the split scan every this-many insertions

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if min(self.min_subwindow, self.scan_stride, self.check_interval) < 1:
            raise ValueError("min_subwindow, scan_stride, check_interval must be >= 1")


def epsilon_cut(delta: float, n1: int, n2: int) -> float:
    """Hoeffding cut threshold sqrt(log(1/d)/(2 n1)) + sqrt(log(1/d)/(2 n2))."""
    if n1 < 1 or n2 < 1:
        raise ZeroCount(f"subwindow counts must be >= 1, got {n1}, {n2}")
    c = math.log(1.0 / delta) / 2.0
    return math.sqrt(c / n1) + math.sqrt(c / n2)


@njit(cache=True)
def _scan_window(vals, arms, n, num_arms, thr, min_sub, stride, rsqrt):
    """First-hit split scan over the first n window entries.

    Split positions are visited oldest-first, arms in ascending order; per-arm
    left-side counts and sums are maintained incrementally against one upfront
    totals pass. thr = sqrt(log(1/delta)/2); rsqrt[c] must hold 1/sqrt(c) for
    every count c up to n.
    """
    tot_cnt = np.zeros(num_arms, dtype=np.int64)
    tot_sum = np.zeros(num_arms)
    for i in range(n):
        tot_cnt[arms[i]] += 1
        tot_sum[arms[i]] += vals[i]
    left_cnt = np.zeros(num_arms, dtype=np.int64)
    left_sum = np.zeros(num_arms)
    next_split = stride
    for i in range(n):
        a = arms[i]
        left_cnt[a] += 1
        left_sum[a] += vals[i]
        if i + 1 == next_split and i + 1 < n:
            next_split += stride
            for k in range(num_arms):
                n1 = left_cnt[k]
                n2 = tot_cnt[k] - n1
                if n1 < min_sub or n2 < min_sub:
                    continue
                gap = abs(left_sum[k] / n1 - (tot_sum[k] - left_sum[k]) / n2)
                if gap >= thr * (rsqrt[n1] + rsqrt[n2]):
                    return True
    return False


@njit(cache=True)
def _stream_first_detection(vals, arms, num_arms, thr, min_sub, stride,
                            check_interval):
    """Feed a whole stream and return the index of the first detection (-1 if none).

    Mirrors AdwinWindow.insert_and_check exactly; used for Monte Carlo batches
    where per-insertion Python overhead would dominate.
    """
    n = len(vals)
    rsqrt = np.empty(n + 1)
    rsqrt[0] = 0.0
    for c in range(1, n + 1):
        rsqrt[c] = 1.0 / math.sqrt(c)
    tot_cnt = np.zeros(num_arms, dtype=np.int64)
    tot_sum = np.zeros(num_arms)
    left_cnt = np.zeros(num_arms, dtype=np.int64)
    left_sum = np.zeros(num_arms)
    since = 0
    for t in range(n):
        tot_cnt[arms[t]] += 1
        tot_sum[arms[t]] += vals[t]
        since += 1
        if since < check_interval:
            continue
        since = 0
        for k in range(num_arms):
            left_cnt[k] = 0
            left_sum[k] = 0.0
        next_split = stride
        for i in range(t + 1):
            a = arms[i]
            left_cnt[a] += 1
            left_sum[a] += vals[i]
            if i + 1 == next_split and i < t:
                next_split += stride
                for k in range(num_arms):
                    n1 = left_cnt[k]
                    n2 = tot_cnt[k] - n1
                    if n1 < min_sub or n2 < min_sub:
                        continue
                    gap = abs(left_sum[k] / n1
                              - (tot_sum[k] - left_sum[k]) / n2)
                    if gap >= thr * (rsqrt[n1] + rsqrt[n2]):
                        return t
    return -1


class AdwinWindow:
    """Growing window of (arm, normalized reward) entries with split scanning."""

    def __init__(self, num_arms: int, cfg: DetectorConfig):
        self.num_arms = int(num_arms)
        self.cfg = cfg
        self._cap = 256
        self._arms = np.zeros(self._cap, dtype=np.int64)
        self._vals = np.zeros(self._cap, dtype=np.float64)
        self._rsqrt = _rsqrt_table(self._cap)
        self.n = 0
        self._since_check = 0

    def __len__(self) -> int:
        return self.n

    def normalize(self, raw_reward: float) -> float:
        v = raw_reward / self.cfg.scale
        return 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)

    def insert_and_check(self, arm: int, raw_reward: float) -> bool:
        """Append the normalized reward and scan all splits; True on detection.

        Detection does not clear the window; the caller decides to reset.
        """
        n = self.n
        if n == self._cap:
            self._cap *= 2
            arms = np.zeros(self._cap, dtype=np.int64)
            vals = np.zeros(self._cap, dtype=np.float64)
            arms[:n] = self._arms
            vals[:n] = self._vals
            self._arms, self._vals = arms, vals
            self._rsqrt = _rsqrt_table(self._cap)
        self._arms[n] = arm
        self._vals[n] = self.normalize(raw_reward)
        self.n = n + 1
        self._since_check += 1
        if self._since_check < self.cfg.check_interval:
            return False
        self._since_check = 0
        thr = math.sqrt(math.log(1.0 / self.cfg.delta) / 2.0)
        return bool(_scan_window(
            self._vals, self._arms, self.n, self.num_arms, thr,
            self.cfg.min_subwindow, self.cfg.scan_stride, self._rsqrt))

    def reset(self) -> None:
        """Empty the window. Idempotent."""
        self.n = 0
        self._since_check = 0

    @property
    def entries(self) -> list:
        """Stored (arm, normalized value) pairs, oldest first."""
        return [(int(self._arms[i]), float(self._vals[i])) for i in range(self.n)]

    def arm_count(self, arm: int) -> int:
        return int(np.count_nonzero(self._arms[:self.n] == arm))

    def arm_mean(self, arm: int, start: int = 0, stop: int | None = None) -> float:
        """Per-arm empirical mean over entries [start, stop); nan if none."""
        stop = self.n if stop is None else stop
        mask = self._arms[start:stop] == arm
        cnt = np.count_nonzero(mask)
        if cnt == 0:
            return float("nan")
        return float(self._vals[start:stop][mask].sum() / cnt)


def first_detection_index(values, arms, num_arms: int, cfg: DetectorConfig) -> int:
    """Run a whole stream through the detector; index of first detection or -1."""
    vals = np.asarray(values, dtype=np.float64) / cfg.scale
    np.clip(vals, 0.0, 1.0, out=vals)
    arm_arr = np.asarray(arms, dtype=np.int64)
    thr = math.sqrt(math.log(1.0 / cfg.delta) / 2.0)
    return int(_stream_first_detection(
        vals, arm_arr, num_arms, thr, cfg.min_subwindow, cfg.scan_stride,
        cfg.check_interval))
