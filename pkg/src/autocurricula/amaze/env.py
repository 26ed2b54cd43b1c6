"""Goal-reaching maze dynamics: scalar reference path and vectorized batch path.

The scalar functions (``transition``, ``compute_reward``, ``observe``)
define the semantics; the ``*_batch`` kernels reimplement them over
stacked lane arrays for throughput. The two paths are independent code
and are held together by equivalence tests.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from ..env.core import Environment, StaticParams, StepResult
from ..errors import ContractViolation
from ..rng import RngStream
from .generator import sample_random_level
from .level import DIR_VECTORS, MazeLevel


class Action(IntEnum):
    TURN_LEFT = 0
    TURN_RIGHT = 1
    FORWARD = 2


TILE_EMPTY = 0
TILE_WALL = 1
TILE_GOAL = 2
TILE_OOB = 3
N_TILE_CODES = 4


@dataclass
class EnvState:
    """Dynamic state of one maze episode.

    ``level`` holds the instance's free parameters (initial configuration);
    the agent's current pose is tracked separately so the level itself is
    never mutated by stepping.
    """

    level: MazeLevel
    agent_pos: tuple[int, int]
    agent_dir: int
    time: int
    terminal: bool

    @classmethod
    def from_level(cls, level: MazeLevel) -> "EnvState":
        return cls(level, tuple(level.agent_pos), int(level.agent_dir), 0, False)


@dataclass
class Observation:
    """Egocentric view: agent at bottom-center facing up, plus its facing."""

    view: np.ndarray  # uint8 [V, V] of tile codes
    dir: int


def transition(state: EnvState, action: int, params: StaticParams) -> EnvState:
    """Advance one deterministic transition. Moves into walls are no-ops."""
    pos, d = state.agent_pos, state.agent_dir
    if action == Action.TURN_LEFT:
        d = (d - 1) % 4
    elif action == Action.TURN_RIGHT:
        d = (d + 1) % 4
    elif action == Action.FORWARD:
        r, c = pos[0] + int(DIR_VECTORS[d][0]), pos[1] + int(DIR_VECTORS[d][1])
        if not state.level.walls[r, c]:
            pos = (r, c)
    else:
        raise ContractViolation(f"unknown action {action}")
    return replace(state, agent_pos=pos, agent_dir=d, time=state.time + 1)


def compute_reward(state: EnvState, params: StaticParams) -> float:
    """Time-discounted success reward; zero off-goal."""
    if tuple(state.agent_pos) == tuple(state.level.goal_pos):
        return 1.0 - 0.9 * state.time / params.max_episode_steps
    return 0.0


def _view_offsets(view_size: int) -> np.ndarray:
    """World-frame cell offsets per (direction, view row, view col)."""
    half = view_size // 2
    offsets = np.zeros((4, view_size, view_size, 2), dtype=np.int64)
    for d in range(4):
        forward = DIR_VECTORS[d]
        right = DIR_VECTORS[(d + 1) % 4]
        for vr in range(view_size):
            ahead = (view_size - 1) - vr
            for vc in range(view_size):
                side = vc - half
                offsets[d, vr, vc] = ahead * forward + side * right
    return offsets


_OFFSETS_CACHE: dict[int, np.ndarray] = {}


def view_offsets(view_size: int) -> np.ndarray:
    if view_size not in _OFFSETS_CACHE:
        _OFFSETS_CACHE[view_size] = _view_offsets(view_size)
    return _OFFSETS_CACHE[view_size]


def apply_occlusion(view: np.ndarray) -> np.ndarray:
    """Mask view cells not reachable by sight lines through transparent cells.

    Visibility propagates from the agent cell (bottom-center) sideways and
    row by row away from the agent; walls and out-of-bounds block it.
    Operates on ``[..., V, V]`` arrays. Masked cells become out-of-bounds.
    """
    v = view.shape[-1]
    half = v // 2
    transparent = (view != TILE_WALL) & (view != TILE_OOB)
    visible = np.zeros(view.shape, dtype=bool)
    visible[..., v - 1, half] = True

    def spread_row(row):
        for c in range(half + 1, v):
            visible[..., row, c] |= visible[..., row, c - 1] & transparent[..., row, c - 1]
        for c in range(half - 1, -1, -1):
            visible[..., row, c] |= visible[..., row, c + 1] & transparent[..., row, c + 1]

    spread_row(v - 1)
    for row in range(v - 2, -1, -1):
        through = visible[..., row + 1, :] & transparent[..., row + 1, :]
        visible[..., row, :] |= through
        visible[..., row, :-1] |= through[..., 1:]
        visible[..., row, 1:] |= through[..., :-1]
        spread_row(row)
    return np.where(visible, view, np.uint8(TILE_OOB))


def observe(state: EnvState, params: StaticParams) -> Observation:
    """Scalar egocentric observation of one state."""
    v = params.agent_view_size
    level = state.level
    h, w = level.walls.shape
    offsets = view_offsets(v)[state.agent_dir]
    view = np.full((v, v), TILE_OOB, dtype=np.uint8)
    ar, ac = state.agent_pos
    for vr in range(v):
        for vc in range(v):
            r, c = ar + offsets[vr, vc, 0], ac + offsets[vr, vc, 1]
            if 0 <= r < h and 0 <= c < w:
                if level.walls[r, c]:
                    view[vr, vc] = TILE_WALL
                elif (r, c) == tuple(level.goal_pos):
                    view[vr, vc] = TILE_GOAL
                else:
                    view[vr, vc] = TILE_EMPTY
    if not params.see_through_walls:
        view = apply_occlusion(view)
    return Observation(view, state.agent_dir)


class MazeEnv(Environment):
    """Partially-observable goal-reaching maze."""

    step_uses_rng = False

    def action_count(self, params: StaticParams) -> int:
        return len(Action)

    def observation_spec(self, params: StaticParams) -> dict:
        v = params.agent_view_size
        return {"view": ((v, v), N_TILE_CODES), "dir": ((), 4)}

    def sample_level(self, rng: RngStream, params: StaticParams) -> MazeLevel:
        return sample_random_level(rng, params)

    def reset(self, rng: RngStream, params: StaticParams) -> StepResult:
        params.validate()
        level = sample_random_level(rng, params)
        return self.reset_to_level(rng, level, params)

    def reset_to_level(self, rng: RngStream, level: MazeLevel, params: StaticParams) -> StepResult:
        state = EnvState.from_level(level)
        return StepResult(observe(state, params), state, 0.0, False, {"solved": 0.0, "time": 0})

    def step(self, rng, state: EnvState, action: int, params: StaticParams) -> StepResult:
        if state.terminal:
            raise ContractViolation("step called on a terminal state")
        state = transition(state, action, params)
        reward = compute_reward(state, params)
        reached = reward > 0.0
        done = reached or state.time >= params.max_episode_steps
        state = replace(state, terminal=done)
        info = {"solved": float(reached), "time": state.time}
        return StepResult(observe(state, params), state, reward, done, info)

    def get_env_state(self, state: EnvState) -> MazeLevel:
        return state.level

    def set_env_state(self, state, level: MazeLevel) -> EnvState:
        level.validate()
        return EnvState.from_level(level)

    def get_env_metrics(self, state: EnvState) -> dict:
        from .metrics import env_metrics

        m = env_metrics(state.level)
        return {
            "n_walls": m.n_walls,
            "shortest_path_length": m.shortest_path_length,
            "solvable": float(m.solvable),
            "passable_ratio": m.passable_ratio,
        }

    # --- vectorized lane protocol -------------------------------------

    def stack_states(self, states: list[EnvState]) -> "MazeStateBatch":
        return MazeStateBatch.from_states(states)

    def make_batch(self, levels: list[MazeLevel]) -> "MazeStateBatch":
        return MazeStateBatch.from_levels(levels)

    def step_batch(self, batch: "MazeStateBatch", actions: np.ndarray, params: StaticParams):
        return step_batch(batch, actions, params)

    def observe_batch(self, batch: "MazeStateBatch", params: StaticParams) -> dict:
        return observe_batch(batch, params)

    def stack_observations(self, observations: list[Observation]) -> dict:
        return {
            "view": np.stack([o.view for o in observations]),
            "dir": np.array([o.dir for o in observations], dtype=np.int64),
        }


@dataclass
class MazeStateBatch:
    """Stacked maze episode state across lanes (struct-of-arrays)."""

    walls: np.ndarray  # bool [B, H, W]
    tile_codes: np.ndarray  # uint8 [B, H, W], walls+goal burned in
    agent_pos: np.ndarray  # int64 [B, 2]
    agent_dir: np.ndarray  # int64 [B]
    goal_pos: np.ndarray  # int64 [B, 2]
    init_agent_pos: np.ndarray  # int64 [B, 2]
    init_agent_dir: np.ndarray  # int64 [B]
    time: np.ndarray  # int64 [B]
    terminal: np.ndarray  # bool [B]

    def __len__(self) -> int:
        return self.walls.shape[0]

    @staticmethod
    def _codes_for(walls: np.ndarray, goal_pos: np.ndarray) -> np.ndarray:
        codes = walls.astype(np.uint8) * TILE_WALL
        codes[np.arange(len(walls)), goal_pos[:, 0], goal_pos[:, 1]] = TILE_GOAL
        return codes

    @classmethod
    def from_levels(cls, levels: list[MazeLevel]) -> "MazeStateBatch":
        walls = np.stack([lv.walls for lv in levels])
        goal = np.array([lv.goal_pos for lv in levels], dtype=np.int64)
        pos = np.array([lv.agent_pos for lv in levels], dtype=np.int64)
        dirs = np.array([lv.agent_dir for lv in levels], dtype=np.int64)
        n = len(levels)
        return cls(
            walls,
            cls._codes_for(walls, goal),
            pos.copy(),
            dirs.copy(),
            goal,
            pos.copy(),
            dirs.copy(),
            np.zeros(n, dtype=np.int64),
            np.zeros(n, dtype=bool),
        )

    @classmethod
    def from_states(cls, states: list[EnvState]) -> "MazeStateBatch":
        batch = cls.from_levels([s.level for s in states])
        batch.agent_pos = np.array([s.agent_pos for s in states], dtype=np.int64)
        batch.agent_dir = np.array([s.agent_dir for s in states], dtype=np.int64)
        batch.time = np.array([s.time for s in states], dtype=np.int64)
        batch.terminal = np.array([s.terminal for s in states], dtype=bool)
        return batch

    def level_at(self, i: int) -> MazeLevel:
        return MazeLevel(
            self.walls[i].copy(),
            tuple(int(x) for x in self.init_agent_pos[i]),
            int(self.init_agent_dir[i]),
            tuple(int(x) for x in self.goal_pos[i]),
        )

    def state_at(self, i: int) -> EnvState:
        return EnvState(
            self.level_at(i),
            tuple(int(x) for x in self.agent_pos[i]),
            int(self.agent_dir[i]),
            int(self.time[i]),
            bool(self.terminal[i]),
        )

    def levels(self) -> list[MazeLevel]:
        return [self.level_at(i) for i in range(len(self))]

    def replace_lanes(self, lanes: np.ndarray, levels: list[MazeLevel]) -> None:
        """Reset the given lanes in place to fresh episodes of ``levels``."""
        sub = MazeStateBatch.from_levels(levels)
        for name in ("walls", "tile_codes", "agent_pos", "agent_dir", "goal_pos",
                     "init_agent_pos", "init_agent_dir", "time", "terminal"):
            getattr(self, name)[lanes] = getattr(sub, name)

    def copy(self) -> "MazeStateBatch":
        return MazeStateBatch(*(getattr(self, f.name).copy() for f in
                                self.__dataclass_fields__.values()))


def step_batch(batch: MazeStateBatch, actions: np.ndarray, params: StaticParams):
    """Vectorized transition + reward + termination across lanes.

    Returns ``(next_batch, reward [B], done [B], info arrays)``.
    """
    if batch.terminal.any():
        raise ContractViolation("step_batch called with terminal lanes")
    actions = np.asarray(actions, dtype=np.int64)
    n = len(batch)
    if actions.shape != (n,):
        raise ContractViolation(f"actions shape {actions.shape} != ({n},)")

    turn = np.where(actions == Action.TURN_LEFT, -1, np.where(actions == Action.TURN_RIGHT, 1, 0))
    dirs = (batch.agent_dir + turn) % 4
    forward = actions == Action.FORWARD
    target = batch.agent_pos + DIR_VECTORS[dirs] * forward[:, None]
    blocked = batch.walls[np.arange(n), target[:, 0], target[:, 1]]
    pos = np.where(blocked[:, None], batch.agent_pos, target)

    time = batch.time + 1
    reached = (pos == batch.goal_pos).all(axis=1)
    done = reached | (time >= params.max_episode_steps)
    reward = np.where(reached, 1.0 - 0.9 * time / params.max_episode_steps, 0.0)

    next_batch = MazeStateBatch(
        batch.walls, batch.tile_codes, pos, dirs, batch.goal_pos,
        batch.init_agent_pos, batch.init_agent_dir, time, done.copy(),
    )
    info = {"solved": reached.astype(np.float64), "time": time.copy()}
    return next_batch, reward, done, info


def observe_batch(batch: MazeStateBatch, params: StaticParams) -> dict:
    """Vectorized egocentric views: ``{"view": uint8 [B,V,V], "dir": int64 [B]}``."""
    h, w = batch.walls.shape[1:]
    offsets = view_offsets(params.agent_view_size)[batch.agent_dir]  # [B, V, V, 2]
    cells = batch.agent_pos[:, None, None, :] + offsets
    rr, cc = cells[..., 0], cells[..., 1]
    in_bounds = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
    lane = np.arange(len(batch))[:, None, None]
    codes = batch.tile_codes[lane, rr.clip(0, h - 1), cc.clip(0, w - 1)]
    view = np.where(in_bounds, codes, np.uint8(TILE_OOB))
    if not params.see_through_walls:
        view = apply_occlusion(view)
    return {"view": view, "dir": batch.agent_dir.copy()}
