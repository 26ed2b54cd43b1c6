"""Population lifting: one agent interface over n independent parameter sets."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..rng import RngStream
from .ppo import PPOAgent, PpoConfig, ppo_update
from .rollout import TrajectoryBatch


class AgentPop:
    """``n`` agents acting member-wise over the population lane axis.

    Flat lanes are ordered member-major: member ``i`` owns lanes
    ``[i * lanes_per_member, (i + 1) * lanes_per_member)``. With ``n = 1``
    this is exactly the base agent.
    """

    def __init__(self, members: list[PPOAgent], lanes_per_member: int):
        if not members:
            raise ConfigError("population must have at least one member")
        self.members = members
        self.lanes_per_member = lanes_per_member

    @classmethod
    def create(
        cls,
        model_factory,
        cfg: PpoConfig,
        rng: RngStream,
        n: int,
        lanes_per_member: int,
        dtype=None,
    ) -> "AgentPop":
        if n < 1:
            raise ConfigError(f"population size must be >= 1, got {n}")
        import torch

        dtype = dtype or torch.float32
        streams = rng.split(n)
        members = [PPOAgent.create(model_factory, cfg, s, dtype) for s in streams]
        return cls(members, lanes_per_member)

    @property
    def n(self) -> int:
        return len(self.members)

    def member_lanes(self, i: int) -> np.ndarray:
        start = i * self.lanes_per_member
        return np.arange(start, start + self.lanes_per_member)

    def initial_hidden(self, n_lanes: int) -> np.ndarray:
        return self.members[0].initial_hidden(n_lanes)

    def act(self, obs: dict, hidden: np.ndarray, g=None, greedy: bool = False):
        """Each member acts on its own lane block; results are concatenated."""
        actions, log_probs, values, hiddens = [], [], [], []
        for i, member in enumerate(self.members):
            lanes = self.member_lanes(i)
            sub = {k: v[lanes] for k, v in obs.items()}
            a, lp, v, h = member.act(sub, hidden[lanes], g=g, greedy=greedy)
            actions.append(a)
            log_probs.append(lp)
            values.append(v)
            hiddens.append(h)
        return (
            np.concatenate(actions),
            np.concatenate(log_probs),
            np.concatenate(values),
            np.concatenate(hiddens),
        )

    def values_of(self, obs: dict, hidden: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [
                m.values_of({k: v[self.member_lanes(i)] for k, v in obs.items()},
                            hidden[self.member_lanes(i)])
                for i, m in enumerate(self.members)
            ]
        )

    def update_members(
        self, traj: TrajectoryBatch, advantages: np.ndarray, returns: np.ndarray, rng: RngStream
    ) -> list[dict]:
        """Member-wise updates, each on its own lane block of the trajectory."""
        stats = []
        for i, member in enumerate(self.members):
            lanes = self.member_lanes(i)
            stats.append(
                ppo_update(
                    [member],
                    [(traj.lane_slice(lanes), advantages[:, lanes], returns[:, lanes])],
                    [rng.fold_in(i)],
                )
            )
        return stats
