"""Hierarchical environment batching.

``batch_lift(env, shape)`` wraps a single-instance environment so reset
and step operate over arrays with outer dimension ``n_agents`` and a
flattened inner dimension ``n_evals * n_envs``. Results are elementwise
identical to running each lane through the single environment with the
correspondingly split rng streams (one child per inner index, row-major).

Environments exposing the vectorized lane protocol (``make_batch``,
``step_batch``, ``observe_batch``, ``sample_level``) get array-kernel
stepping; anything else falls back to a per-lane loop with identical
semantics.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..rng import RngStream
from .core import BatchShape, Environment, StaticParams, StepResult


def batch_lift(env: Environment, shape: BatchShape):
    """Lift a single-instance environment to a batched one."""
    if hasattr(env, "make_batch") and hasattr(env, "step_batch"):
        return VectorBatchEnv(env, shape)
    return GenericBatchEnv(env, shape)


class BaseBatchEnv:
    def __init__(self, env: Environment, shape: BatchShape):
        self.env = env
        self.shape = shape

    @property
    def n_lanes(self) -> int:
        return self.shape.n_agents * self.shape.flat_size

    def action_count(self, params: StaticParams) -> int:
        return self.env.action_count(params)

    def _lane_streams(self, rng: RngStream) -> list[RngStream]:
        return rng.split(self.n_lanes)

    def _reshape(self, arr: np.ndarray) -> np.ndarray:
        return arr.reshape(self.shape.n_agents, self.shape.flat_size, *arr.shape[1:])

    def _flatten_actions(self, actions: np.ndarray) -> np.ndarray:
        actions = np.asarray(actions)
        expect = (self.shape.n_agents, self.shape.flat_size)
        if actions.shape != expect:
            raise ShapeError(f"actions shape {actions.shape} != {expect}")
        return actions.reshape(-1)

    def _expand_levels(self, levels: list) -> list:
        """Replicate ``n_envs`` levels across the eval and agent dimensions."""
        if len(levels) == self.n_lanes:
            return list(levels)
        if len(levels) != self.shape.n_envs:
            raise ShapeError(
                f"expected {self.shape.n_envs} levels (or {self.n_lanes} pre-flattened), "
                f"got {len(levels)}"
            )
        inner = [levels[i % self.shape.n_envs] for i in range(self.shape.flat_size)]
        return inner * self.shape.n_agents

    def _result(self, obs: dict, state, reward, done, info) -> StepResult:
        return StepResult(
            {k: self._reshape(v) for k, v in obs.items()},
            state,
            self._reshape(np.asarray(reward)),
            self._reshape(np.asarray(done)),
            {k: self._reshape(np.asarray(v)) for k, v in info.items()},
        )


class VectorBatchEnv(BaseBatchEnv):
    """Array-kernel batching. Requires deterministic dynamics."""

    def __init__(self, env: Environment, shape: BatchShape):
        super().__init__(env, shape)
        if env.step_uses_rng:
            raise ShapeError("vector batching requires an env with deterministic stepping")

    def reset(self, rng: RngStream, params: StaticParams) -> StepResult:
        params.validate()
        levels = [self.env.sample_level(r, params) for r in self._lane_streams(rng)]
        return self.reset_to_levels(rng, levels, params)

    def reset_to_levels(self, rng: RngStream | None, levels: list, params: StaticParams) -> StepResult:
        batch = self.env.make_batch(self._expand_levels(levels))
        obs = self.env.observe_batch(batch, params)
        n = self.n_lanes
        info = {"solved": np.zeros(n), "time": np.zeros(n, dtype=np.int64)}
        return self._result(obs, batch, np.zeros(n), np.zeros(n, dtype=bool), info)

    def step(self, rng: RngStream | None, state, actions: np.ndarray, params: StaticParams) -> StepResult:
        flat = self._flatten_actions(actions)
        next_state, reward, done, info = self.env.step_batch(state, flat, params)
        obs = self.env.observe_batch(next_state, params)
        return self._result(obs, next_state, reward, done, info)

    def lane_levels(self, state) -> list:
        return state.levels()

    def reset_lanes(self, state, lanes: np.ndarray, levels: list, params: StaticParams):
        """Reset the given flat lanes to fresh episodes of ``levels`` in place.

        Returns the fresh observations for those lanes (flat arrays).
        """
        sub = self.env.make_batch(levels)
        obs = self.env.observe_batch(sub, params)
        state.replace_lanes(lanes, levels)
        return state, obs


class GenericBatchEnv(BaseBatchEnv):
    """Per-lane loop batching for environments without array kernels."""

    def reset(self, rng: RngStream, params: StaticParams) -> StepResult:
        results = [self.env.reset(r, params) for r in self._lane_streams(rng)]
        return self._combine(results)

    def reset_to_levels(self, rng: RngStream | None, levels: list, params: StaticParams) -> StepResult:
        results = [self.env.reset_to_level(rng, lv, params) for lv in self._expand_levels(levels)]
        return self._combine(results)

    def step(self, rng: RngStream | None, state: list, actions: np.ndarray, params: StaticParams) -> StepResult:
        flat = self._flatten_actions(actions)
        if len(state) != len(flat):
            raise ShapeError(f"{len(state)} states vs {len(flat)} actions")
        if self.env.step_uses_rng and rng is not None:
            streams = self._lane_streams(rng)
        else:
            streams = [None] * len(flat)
        results = [self.env.step(r, s, int(a), params) for r, s, a in zip(streams, state, flat)]
        out = self._combine(results)
        return out

    def _combine(self, results: list[StepResult]) -> StepResult:
        obs = self.env.stack_observations([r.observation for r in results])
        states = [r.state for r in results]
        reward = np.array([r.reward for r in results], dtype=np.float64)
        done = np.array([r.done for r in results], dtype=bool)
        info = {k: np.array([r.info[k] for r in results]) for k in results[0].info}
        return self._result(obs, states, reward, done, info)

    def lane_levels(self, state: list) -> list:
        return [self.env.get_env_state(s) for s in state]

    def reset_lanes(self, state: list, lanes: np.ndarray, levels: list, params: StaticParams):
        fresh = [self.env.reset_to_level(None, lv, params) for lv in levels]
        for lane, res in zip(lanes, fresh):
            state[lane] = res.state
        obs = self.env.stack_observations([r.observation for r in fresh])
        return state, obs
