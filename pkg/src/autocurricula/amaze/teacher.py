"""The level-designer decision process.

A teacher episode builds one maze in a fixed number of steps:aimed wall
placements for ``wall_budget`` steps, then one goal placement, then one
agent placement. Actions index interior cells in row-major order, which
keeps the action space fixed-size and makes every decoded level valid by
construction:

- wall placement on an already-walled cell is a no-op step;
- goal placement on a walled cell clears that wall;
- agent placement on the goal or a wall falls forward (wrapping) along
  the row-major interior scan to the nearest free non-goal cell.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from ..env.core import Environment, StaticParams, StepResult
from ..errors import ContractViolation
from ..rng import RngStream
from .env import TILE_EMPTY, TILE_GOAL, TILE_WALL
from .level import Direction, MazeLevel


class DesignPhase(IntEnum):
    PLACING_WALLS = 0
    PLACING_GOAL = 1
    PLACING_AGENT = 2
    DONE = 3


@dataclass
class TeacherState:
    partial_walls: np.ndarray  # bool [H, W], border preset
    n_placed: int  # wall-phase steps taken
    phase: int
    goal_pos: tuple[int, int] | None
    agent_pos: tuple[int, int] | None

    @classmethod
    def empty(cls, params: StaticParams) -> "TeacherState":
        walls = np.zeros((params.height, params.width), dtype=bool)
        walls[0, :] = walls[-1, :] = walls[:, 0] = walls[:, -1] = True
        phase = DesignPhase.PLACING_WALLS if params.wall_budget > 0 else DesignPhase.PLACING_GOAL
        return cls(walls, 0, int(phase), None, None)


def _cell_of(action: int, params: StaticParams) -> tuple[int, int]:
    iw = params.width - 2
    n = params.n_interior
    if not 0 <= action < n:
        raise ContractViolation(f"design action {action} outside interior range [0, {n})")
    return (1 + action // iw, 1 + action % iw)


def teacher_step(tstate: TeacherState, action: int, params: StaticParams) -> TeacherState:
    """Apply one design decision. Phases advance monotonically to DONE."""
    if tstate.phase == DesignPhase.DONE:
        raise ContractViolation("teacher_step called on a finished design")
    cell = _cell_of(int(action), params)
    walls = tstate.partial_walls

    if tstate.phase == DesignPhase.PLACING_WALLS:
        if not walls[cell]:
            walls = walls.copy()
            walls[cell] = True
        n_placed = tstate.n_placed + 1
        phase = DesignPhase.PLACING_GOAL if n_placed >= params.wall_budget else DesignPhase.PLACING_WALLS
        return replace(tstate, partial_walls=walls, n_placed=n_placed, phase=int(phase))

    if tstate.phase == DesignPhase.PLACING_GOAL:
        if walls[cell]:
            walls = walls.copy()
            walls[cell] = False
        return replace(tstate, partial_walls=walls, goal_pos=cell, phase=int(DesignPhase.PLACING_AGENT))

    # placing agent: wrap forward over the row-major interior scan until free
    iw = params.width - 2
    start = (cell[0] - 1) * iw + (cell[1] - 1)
    for k in range(params.n_interior):
        r, c = _cell_of((start + k) % params.n_interior, params)
        if not walls[r, c] and (r, c) != tstate.goal_pos:
            return replace(tstate, agent_pos=(r, c), phase=int(DesignPhase.DONE))
    raise ContractViolation("no free cell left for the agent")  # unreachable given wall_budget bound


def decode_teacher_level(tstate: TeacherState) -> MazeLevel:
    """The level produced by a finished design. Agent faces north."""
    if tstate.phase != DesignPhase.DONE:
        raise ContractViolation("design sequence not finished")
    return MazeLevel(
        tstate.partial_walls.copy(), tstate.agent_pos, int(Direction.NORTH), tstate.goal_pos
    )


def teacher_observe(tstate: TeacherState) -> "TeacherObservation":
    """Deterministic encoding: full tile grid, one-hot phase, placement count."""
    grid = tstate.partial_walls.astype(np.uint8) * TILE_WALL
    if tstate.goal_pos is not None:
        grid[tstate.goal_pos] = TILE_GOAL
    phase = np.zeros(4, dtype=np.float32)
    phase[tstate.phase] = 1.0
    return TeacherObservation(grid, phase, tstate.n_placed)


@dataclass
class TeacherObservation:
    grid: np.ndarray  # uint8 [H, W] of tile codes
    phase: np.ndarray  # float32 one-hot [4]
    n_placed: int


@dataclass
class TeacherEnvState:
    design: TeacherState
    time: int
    terminal: bool


class TeacherEnv(Environment):
    """Environment wrapper around the design process for PPO teachers.

    Per-step reward is zero; the curriculum runner injects its objective
    (e.g. student regret) at the terminal design step.
    """

    step_uses_rng = False

    def action_count(self, params: StaticParams) -> int:
        return params.n_interior

    def episode_length(self, params: StaticParams) -> int:
        return params.wall_budget + 2

    def reset(self, rng: RngStream, params: StaticParams) -> StepResult:
        state = TeacherEnvState(TeacherState.empty(params), 0, False)
        return StepResult(teacher_observe(state.design), state, 0.0, False, {"time": 0})

    def step(self, rng, state: TeacherEnvState, action: int, params: StaticParams) -> StepResult:
        if state.terminal:
            raise ContractViolation("step called on a terminal design state")
        design = teacher_step(state.design, action, params)
        done = design.phase == DesignPhase.DONE
        state = TeacherEnvState(design, state.time + 1, done)
        return StepResult(teacher_observe(design), state, 0.0, done, {"time": state.time})

    def designed_level(self, state: TeacherEnvState) -> MazeLevel:
        return decode_teacher_level(state.design)

    def stack_observations(self, observations: list[TeacherObservation]) -> dict:
        return {
            "grid": np.stack([o.grid for o in observations]),
            "phase": np.stack([o.phase for o in observations]),
            "n_placed": np.array([o.n_placed for o in observations], dtype=np.int64),
        }
