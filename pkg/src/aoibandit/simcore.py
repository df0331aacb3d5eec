"""Slotted-time network dynamics: requests, fetch decisions, rewards, ages.

State lives in small nested Python lists (J, K, P are tiny); the per-slot
randomness is pre-drawn into numpy arrays, one independent substream per
(client, server) request pair and per (AN, server) fetch pair, so adding or
swapping a policy never perturbs the environment draws.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import NetworkConfig
from .policies import PolicyObservation

NO_REQUEST = -1


@dataclass
class WorldState:
    """Mutable per-slot state: AN age table g (K x P), client age table h (J x P)."""

    an_age: list          # g, K x P ints >= 1
    client_age: list      # h, J x P ints >= 1
    t: int = 0


@dataclass
class SlotActions:
    """Requests (J x P AN indices, NO_REQUEST for none) and fetch decisions.

    decisions[k][p] is meaningful only where targeted[k][p] is True (at least
    one request named that pair); elsewhere it is False and treated as no-op.
    """

    requests: list
    decisions: list = field(default_factory=list)
    targeted: list = field(default_factory=list)


@dataclass
class SlotOutcome:
    """Per-slot result: raw AoI-reduction rewards plus pre-update snapshots."""

    rewards: list         # J x P nonnegative ints
    chosen_arm: list      # J x P, mirrors requests
    pre_h: list
    pre_g: list
    resets: list = field(default_factory=list)   # (j, p) pairs whose learner reset


def initial_state(cfg: NetworkConfig) -> WorldState:
    g = [[1] * cfg.num_servers for _ in range(cfg.num_ans)]
    h = [[1] * cfg.num_servers for _ in range(cfg.num_clients)]
    return WorldState(an_age=g, client_age=h, t=0)


class EnvDraws:
    """Pre-drawn uniforms for the whole horizon.

    request_u[j][p][t] decides whether client j requests server p at slot t;
    gamma_u[k][p][t] decides AN k's fetch for server p at slot t. Every stream
    is derived from the root seed with a fixed spawn key, so the draws are
    identical across policy runs that share a config and seed.
    """

    def __init__(self, cfg: NetworkConfig, horizon: int | None = None):
        T = int(horizon if horizon is not None else cfg.horizon)
        self.horizon = T
        self.request_u = [
            [np.random.default_rng(
                np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1, j, p))
            ).random(T) for p in range(cfg.num_servers)]
            for j in range(cfg.num_clients)
        ]
        self.gamma_u = [
            [np.random.default_rng(
                np.random.SeedSequence(entropy=cfg.seed, spawn_key=(2, k, p))
            ).random(T) for p in range(cfg.num_servers)]
            for k in range(cfg.num_ans)
        ]

    def policy_seed(self, j: int, p: int, root_seed: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=root_seed, spawn_key=(3, j, p))


def sample_requests(cfg: NetworkConfig, policies, state: WorldState,
                    env: EnvDraws) -> list:
    """Draw request presence per (j, p) and query the pair's policy for the AN.

    Policies see only local observables (their own age row and the slot index).
    """
    t = state.t
    q = cfg.request_prob
    requests = []
    for j in range(cfg.num_clients):
        h_row = state.client_age[j]
        row = []
        pol_row = policies[j]
        req_row = env.request_u[j]
        for p in range(cfg.num_servers):
            if req_row[p][t] < q[j][p]:
                obs = PolicyObservation(t=t, own_ages=h_row)
                row.append(pol_row[p].select(obs))
            else:
                row.append(NO_REQUEST)
        requests.append(row)
    return requests


def sample_update_decisions(cfg: NetworkConfig, requests: list,
                            state: WorldState, env: EnvDraws) -> SlotActions:
    """One shared Bernoulli(r[k][p]) fetch draw per targeted (AN, server) pair."""
    K, P = cfg.num_ans, cfg.num_servers
    t = state.t
    targeted = [[False] * P for _ in range(K)]
    for row in requests:
        for p in range(P):
            k = row[p]
            if k >= 0:
                targeted[k][p] = True
    r = cfg.update_prob
    decisions = [[False] * P for _ in range(K)]
    for k in range(K):
        tk = targeted[k]
        gk = env.gamma_u[k]
        for p in range(P):
            if tk[p]:
                decisions[k][p] = bool(gk[p][t] < r[k][p])
    return SlotActions(requests=requests, decisions=decisions, targeted=targeted)


def compute_rewards(state: WorldState, actions: SlotActions) -> SlotOutcome:
    """Raw AoI-reduction rewards from the pre-update age tables."""
    h, g = state.client_age, state.an_age
    rewards = []
    for j, req_row in enumerate(actions.requests):
        h_row = h[j]
        out = []
        for p, k in enumerate(req_row):
            if k < 0:
                out.append(0)
            elif actions.decisions[k][p]:
                out.append(h_row[p])
            else:
                hjp = h_row[p]
                out.append(hjp - min(hjp, g[k][p]))
        rewards.append(out)
    return SlotOutcome(
        rewards=rewards,
        chosen_arm=[row[:] for row in actions.requests],
        pre_h=[row[:] for row in h],
        pre_g=[row[:] for row in g],
    )


def advance_an_ages(state: WorldState, actions: SlotActions) -> None:
    """Reset g to 1 on a successful fetch, otherwise increment."""
    g = state.an_age
    for k, g_row in enumerate(g):
        dec, tgt = actions.decisions[k], actions.targeted[k]
        for p in range(len(g_row)):
            if tgt[p] and dec[p]:
                g_row[p] = 1
            else:
                g_row[p] += 1


def advance_client_ages(state: WorldState, actions: SlotActions,
                        pre_g: list) -> None:
    """Advance h using the pre-update AN ages.

    Fresh fetch resets to 1; a cached serve yields min(h, g) + 1 (anything
    staler than the client's current copy is discarded); no request means +1.
    """
    h = state.client_age
    for j, req_row in enumerate(actions.requests):
        h_row = h[j]
        for p, k in enumerate(req_row):
            if k < 0:
                h_row[p] += 1
            elif actions.decisions[k][p]:
                h_row[p] = 1
            else:
                h_row[p] = min(h_row[p], pre_g[k][p]) + 1


def expected_reward(state: WorldState, cfg: NetworkConfig,
                    j: int, p: int, k: int) -> float:
    """Closed-form mean of the slot reward given the client requests via AN k.

    The fetch draw is Bernoulli(r[k][p]) whenever this client requests, so
    E[x] = h - (1 - r) * min(h, g) exactly.
    """
    hjp = state.client_age[j][p]
    r = cfg.update_prob[k][p]
    return hjp - (1.0 - r) * min(hjp, state.an_age[k][p])


def step_slot(cfg: NetworkConfig, state: WorldState, policies,
              env: EnvDraws) -> SlotOutcome:
    """Run one slot: requests, fetch draws, rewards, age updates, notifications."""
    requests = sample_requests(cfg, policies, state, env)
    actions = sample_update_decisions(cfg, requests, state, env)
    outcome = compute_rewards(state, actions)
    advance_an_ages(state, actions)
    advance_client_ages(state, actions, outcome.pre_g)
    for j, req_row in enumerate(requests):
        pol_row = policies[j]
        rew_row = outcome.rewards[j]
        for p, k in enumerate(req_row):
            if k < 0:
                pol_row[p].skip_slot()
            elif pol_row[p].observe(k, rew_row[p]):
                outcome.resets.append((j, p))
    state.t += 1
    return outcome
