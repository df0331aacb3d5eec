"""Built-in experiment scenarios."""
from __future__ import annotations

from dataclasses import dataclass, field

from .config import NetworkConfig, validate_config

ALL_POLICIES = ("abar", "ducb", "swucb", "oracle", "random")

FULL_HORIZON_1 = 600_000
DESK_HORIZON = 100_000


@dataclass
class ScenarioPreset:
    name: str
    config: NetworkConfig
    policies: tuple = ALL_POLICIES
    description: str = ""
    # optional scripted switch of the fetch-probability matrix: (slot, new K x P matrix)
    r_switch: tuple | None = None

    def __post_init__(self):
        validate_config(self.config)
        if self.r_switch is not None:
            slot, mat = self.r_switch
            probe = NetworkConfig(
                self.config.num_clients, self.config.num_ans,
                self.config.num_servers, self.config.horizon,
                update_prob=mat, resource_cap=self.config.resource_cap)
            validate_config(probe)
            self.r_switch = (int(slot), probe.update_prob)


def builtin_scenarios() -> dict[str, ScenarioPreset]:
    return {
        "scenario1": ScenarioPreset(
            name="scenario1",
            config=NetworkConfig(
                num_clients=2, num_ans=3, num_servers=1,
                horizon=FULL_HORIZON_1,
                update_prob=[[0.1], [0.4], [0.7]],
                resource_cap=1.0, request_prob=1.0),
            description="Well-separated fetch probabilities (0.1/0.4/0.7)."),
        "scenario2": ScenarioPreset(
            name="scenario2",
            config=NetworkConfig(
                num_clients=2, num_ans=3, num_servers=1,
                horizon=FULL_HORIZON_1,
                update_prob=[[0.3], [0.4], [0.5]],
                resource_cap=1.0, request_prob=1.0),
            description="Closely spaced fetch probabilities (0.3/0.4/0.5)."),
        "single_an_analytic": ScenarioPreset(
            name="single_an_analytic",
            config=NetworkConfig(
                num_clients=1, num_ans=1, num_servers=1,
                horizon=DESK_HORIZON,
                update_prob=[[0.5]],
                resource_cap=1.0, request_prob=1.0),
            policies=("random",),
            description="One client, one AN, r=0.5: long-run mean AoI is 1/r."),
        "synthetic_abrupt": ScenarioPreset(
            name="synthetic_abrupt",
            config=NetworkConfig(
                num_clients=1, num_ans=3, num_servers=1,
                horizon=20_000,
                update_prob=[[0.8], [0.1], [0.1]],
                resource_cap=1.0, request_prob=1.0),
            policies=("abar", "random"),
            r_switch=(10_000, [[0.1], [0.1], [0.8]]),
            description="Scripted fetch-probability swap at slot 10000 for "
                        "detector diagnostics."),
    }
