"""Experience collection over batched environments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env.core import StaticParams, StepResult
from ..errors import ContractViolation
from ..rng import RngStream


def flatten_obs(obs: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Collapse the [n_agents, flat] leading dims to one lane axis."""
    return {k: v.reshape(-1, *v.shape[2:]) for k, v in obs.items()}


@dataclass
class TrajectoryBatch:
    """Time-major rollout storage: arrays are ``[T, B, ...]`` over flat lanes.

    ``pre_hidden[t]`` is the recurrent carry fed into the policy at step
    ``t`` (already zeroed after an episode boundary), so any time slice
    can be re-forwarded exactly from stored state.
    """

    obs: dict[str, np.ndarray]
    actions: np.ndarray  # int64 [T, B]
    log_probs: np.ndarray  # float64 [T, B]
    values: np.ndarray  # float64 [T, B]
    rewards: np.ndarray  # float64 [T, B]
    dones: np.ndarray  # bool [T, B]
    pre_hidden: np.ndarray  # [T, B, H]

    @property
    def length(self) -> int:
        return self.actions.shape[0]

    @property
    def n_lanes(self) -> int:
        return self.actions.shape[1]

    def reset_masks(self) -> np.ndarray:
        """True where the recurrent carry restarts before step t."""
        masks = np.zeros_like(self.dones)
        masks[1:] = self.dones[:-1]
        return masks

    def lane_slice(self, lanes: np.ndarray) -> "TrajectoryBatch":
        return TrajectoryBatch(
            {k: v[:, lanes] for k, v in self.obs.items()},
            self.actions[:, lanes],
            self.log_probs[:, lanes],
            self.values[:, lanes],
            self.rewards[:, lanes],
            self.dones[:, lanes],
            self.pre_hidden[:, lanes],
        )

    @staticmethod
    def concat_lanes(parts: list["TrajectoryBatch"]) -> "TrajectoryBatch":
        keys = parts[0].obs.keys()
        return TrajectoryBatch(
            {k: np.concatenate([p.obs[k] for p in parts], axis=1) for k in keys},
            *(
                np.concatenate([getattr(p, f) for p in parts], axis=1)
                for f in ("actions", "log_probs", "values", "rewards", "dones", "pre_hidden")
            ),
        )


@dataclass
class RolloutCursor:
    """Where a rollout left off: enough to continue or bootstrap."""

    obs: dict[str, np.ndarray]  # flat [B, ...]
    state: object
    extras: dict
    hidden: np.ndarray  # [B, H]


def rollout(
    rng: RngStream,
    actor,
    env,
    start: StepResult | RolloutCursor,
    length: int,
    params: StaticParams,
    hidden: np.ndarray | None = None,
    greedy: bool = False,
) -> tuple[TrajectoryBatch, RolloutCursor]:
    """Collect ``length`` transitions from every lane.

    ``env`` is an auto-resetting batched environment; finished lanes
    restart within the rollout and their recurrent carry is zeroed.
    Action sampling draws from one child stream per step, so rollouts are
    deterministic in ``rng`` (and in nothing else).
    """
    if length < 1:
        raise ContractViolation(f"rollout length must be >= 1, got {length}")
    if isinstance(start, RolloutCursor):
        obs, state, extras = dict(start.obs), start.state, start.extras
        hidden = start.hidden if hidden is None else hidden
    else:
        obs = flatten_obs(start.observation)
        state, extras = start.state, start.extras
    n_lanes = next(iter(obs.values())).shape[0]
    if hidden is None:
        hidden = actor.initial_hidden(n_lanes)

    shape = env.shape
    obs_store: dict[str, np.ndarray] = {
        k: np.empty((length, *v.shape), dtype=v.dtype) for k, v in obs.items()
    }
    actions = np.empty((length, n_lanes), dtype=np.int64)
    log_probs = np.empty((length, n_lanes))
    values = np.empty((length, n_lanes))
    rewards = np.empty((length, n_lanes))
    dones = np.empty((length, n_lanes), dtype=bool)
    pre_hidden = np.empty((length, *hidden.shape), dtype=hidden.dtype)

    for t in range(length):
        for k, v in obs.items():
            obs_store[k][t] = v
        pre_hidden[t] = hidden
        g = None if greedy else rng.fold_in(t).generator()
        act, logp, val, hidden = actor.act(obs, hidden, g=g, greedy=greedy)
        result = env.step(
            None, state, act.reshape(shape.n_agents, shape.flat_size), params, extras
        )
        actions[t] = act
        log_probs[t] = logp
        values[t] = val
        rewards[t] = result.reward.reshape(-1)
        dones[t] = result.done.reshape(-1)
        hidden = hidden * ~dones[t][:, None]
        obs = flatten_obs(result.observation)
        state, extras = result.state, result.extras

    traj = TrajectoryBatch(obs_store, actions, log_probs, values, rewards, dones, pre_hidden)
    return traj, RolloutCursor(obs, state, extras, hidden)


def sample_actions(logits: np.ndarray, g: np.random.Generator) -> np.ndarray:
    """Inverse-CDF categorical sampling, one uniform draw per lane."""
    z = logits - logits.max(axis=-1, keepdims=True)
    probs = np.exp(z)
    probs /= probs.sum(axis=-1, keepdims=True)
    u = g.random(logits.shape[0])
    cum = np.cumsum(probs, axis=-1)
    return np.minimum((u[:, None] > cum).sum(axis=-1), logits.shape[-1] - 1).astype(np.int64)


def per_lane_episode_stats(
    rewards: np.ndarray, dones: np.ndarray, gamma: float = 1.0
) -> dict[str, np.ndarray]:
    """Completed-episode statistics per lane from time-major arrays.

    Episode returns are discounted by ``gamma`` within each episode
    (``gamma=1`` gives plain sums). Lanes with no completed episode
    report zero return and count.
    """
    steps, n_lanes = rewards.shape
    acc = np.zeros(n_lanes)
    discount = np.ones(n_lanes)
    count = np.zeros(n_lanes, dtype=np.int64)
    total = np.zeros(n_lanes)
    best = np.zeros(n_lanes)
    solved = np.zeros(n_lanes, dtype=np.int64)
    for t in range(steps):
        acc += discount * rewards[t]
        discount *= gamma
        ended = dones[t]
        if ended.any():
            count[ended] += 1
            total[ended] += acc[ended]
            best[ended] = np.maximum(best[ended], acc[ended])
            solved[ended] += acc[ended] > 0
            acc[ended] = 0.0
    has = count > 0
    mean_return = np.where(has, total / np.maximum(count, 1), 0.0)
    solved_rate = np.where(has, solved / np.maximum(count, 1), 0.0)
    return {
        "episodes": count,
        "mean_return": mean_return,
        "max_return": best,
        "solved_rate": solved_rate,
    }
