"""Static network parameters and their validation."""
from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Base class for invalid network configurations."""


class ZeroDimension(ConfigError):
    """A count (clients, ANs, servers, horizon) is below 1."""


class ProbabilityRange(ConfigError):
    """A probability entry lies outside [0, 1]."""


class ResourceCapViolation(ConfigError):
    """Some AN's per-slot fetch probabilities sum above the resource cap."""


def _as_matrix(value, rows: int, cols: int, name: str) -> list[list[float]]:
    """Coerce a scalar or nested sequence into a rows x cols list of floats."""
    if isinstance(value, (int, float)):
        return [[float(value)] * cols for _ in range(rows)]
    mat = [[float(x) for x in row] for row in value]
    if len(mat) != rows or any(len(row) != cols for row in mat):
        raise ConfigError(f"{name} must be {rows}x{cols}, got {mat!r}")
    return mat


@dataclass
class NetworkConfig:
    """System parameters for one simulated network.

    update_prob is the K x P matrix of fetch probabilities (one row per AN),
    request_prob the J x P matrix of per-slot request probabilities (a scalar
    broadcasts; the experiments in this repo use 1.0, one request per slot).
    reward_cap is the normalization constant applied to raw AoI-reduction
    rewards before they are fed to the learners and the change detector.
    """

    num_clients: int
    num_ans: int
    num_servers: int
    horizon: int
    update_prob: list = field(default_factory=list)
    resource_cap: float = 1.0
    request_prob: object = 1.0
    reward_cap: float = 5.0
    seed: int = 0

    def __post_init__(self):
        self.num_clients = int(self.num_clients)
        self.num_ans = int(self.num_ans)
        self.num_servers = int(self.num_servers)
        self.horizon = int(self.horizon)
        if min(self.num_clients, self.num_ans, self.num_servers, self.horizon) >= 1:
            self.update_prob = _as_matrix(
                self.update_prob, self.num_ans, self.num_servers, "update_prob")
            self.request_prob = _as_matrix(
                self.request_prob, self.num_clients, self.num_servers, "request_prob")
        self.resource_cap = float(self.resource_cap)
        self.reward_cap = float(self.reward_cap)
        self.seed = int(self.seed)


def validate_config(cfg: NetworkConfig) -> NetworkConfig:
    """Check all invariants; return cfg unchanged if they hold."""
    if min(cfg.num_clients, cfg.num_ans, cfg.num_servers, cfg.horizon) < 1:
        raise ZeroDimension(
            f"J={cfg.num_clients}, K={cfg.num_ans}, P={cfg.num_servers}, "
            f"T={cfg.horizon} must all be >= 1")
    if cfg.resource_cap < 0:
        raise ConfigError(f"resource_cap must be >= 0, got {cfg.resource_cap}")
    if cfg.reward_cap <= 0:
        raise ConfigError(f"reward_cap must be > 0, got {cfg.reward_cap}")
    for name, mat in (("update_prob", cfg.update_prob),
                      ("request_prob", cfg.request_prob)):
        for row in mat:
            for v in row:
                if not 0.0 <= v <= 1.0:
                    raise ProbabilityRange(f"{name} entry {v} outside [0, 1]")
    for k, row in enumerate(cfg.update_prob):
        total = sum(row)
        if total > cfg.resource_cap + 1e-12:
            raise ResourceCapViolation(
                f"AN {k}: sum of fetch probabilities {total} exceeds "
                f"resource cap {cfg.resource_cap}")
    return cfg
