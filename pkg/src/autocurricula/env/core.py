"""Environment contract and shared domain types.

Environments here are parameterized two ways: *static parameters*
(``StaticParams``) fix structural aspects at initialization time, e.g.
grid size; *free parameters* (the level) vary per instance and live in
the environment state. Environments expose getter/setter methods for the
free parameters so curricula can place arbitrary instances.

All operations are pure functions of ``(rng, state, action, params)``:
identical inputs give bit-identical outputs, and values can move freely
between threads.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Any

from ..errors import ConfigError
from ..rng import RngStream


@dataclass(frozen=True)
class StaticParams:
    """Fixed environment parameters, set once per experiment."""

    height: int = 13
    width: int = 13
    max_episode_steps: int = 250
    agent_view_size: int = 5
    wall_budget: int = 60
    see_through_walls: bool = True

    def validate(self) -> "StaticParams":
        if self.height < 3 or self.width < 3:
            raise ConfigError(f"grid must be at least 3x3, got {self.height}x{self.width}")
        if self.agent_view_size < 3 or self.agent_view_size % 2 == 0:
            raise ConfigError(f"agent_view_size must be odd and >= 3, got {self.agent_view_size}")
        if self.max_episode_steps < 1:
            raise ConfigError(f"max_episode_steps must be >= 1, got {self.max_episode_steps}")
        max_walls = (self.height - 2) * (self.width - 2) - 2
        if not 0 <= self.wall_budget <= max_walls:
            raise ConfigError(
                f"wall_budget must be in [0, {max_walls}] for a "
                f"{self.height}x{self.width} grid, got {self.wall_budget}"
            )
        return self

    @property
    def n_interior(self) -> int:
        return (self.height - 2) * (self.width - 2)


@dataclass
class StepResult:
    """Return value of ``reset`` and ``step``.

    ``info`` carries environment scalars (episode stats); ``extras`` is an
    opaque slot owned by wrappers, round-tripped untouched by the
    environment core.
    """

    observation: Any
    state: Any
    reward: Any
    done: Any
    info: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BatchShape:
    """Hierarchical batch dimensions: population x evaluations x instances.

    The two inner dimensions are flattened inside batched environments, so
    arrays carry shape ``[n_agents, n_evals * n_envs, ...]``.
    """

    n_agents: int = 1
    n_evals: int = 1
    n_envs: int = 1

    def __post_init__(self):
        if min(self.n_agents, self.n_evals, self.n_envs) < 1:
            raise ConfigError(f"batch dimensions must all be >= 1, got {self}")

    @property
    def flat_size(self) -> int:
        return self.n_evals * self.n_envs

    @property
    def total(self) -> int:
        return self.n_agents * self.flat_size


class Environment(ABC):
    """Single-instance environment interface.

    ``step`` may ignore its rng (``step_uses_rng = False`` advertises
    deterministic dynamics so batched stepping can skip stream splitting).
    """

    step_uses_rng: bool = True

    @abstractmethod
    def reset(self, rng: RngStream, params: StaticParams) -> StepResult: ...

    @abstractmethod
    def step(self, rng: RngStream | None, state, action: int, params: StaticParams) -> StepResult: ...

    @abstractmethod
    def action_count(self, params: StaticParams) -> int: ...

    def get_env_metrics(self, state) -> dict:
        """Scalar attributes of the current instance (optional)."""
        return {}


def set_time(state, time: int, terminal: bool):
    return replace(state, time=time, terminal=terminal)
