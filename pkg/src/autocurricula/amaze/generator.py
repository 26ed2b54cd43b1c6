"""Procedural level sampling and mutation.

``sample_random_level`` is the domain-randomization generator: a uniform
wall count in ``[0, wall_budget]``, walls on distinct interior cells,
then goal, agent, and facing drawn uniformly from what remains.

``mutate_level`` is the evolutionary edit operator: each edit either
relocates the goal (small probability) or toggles the wall state of an
interior cell, never touching the agent or goal cells.
"""

from __future__ import annotations

import numpy as np

from ..env.core import StaticParams
from ..errors import ContractViolation
from ..rng import RngStream
from .level import MazeLevel

GOAL_RELOCATION_PROB = 0.05


def _empty_walls(params: StaticParams) -> np.ndarray:
    walls = np.zeros((params.height, params.width), dtype=bool)
    walls[0, :] = walls[-1, :] = walls[:, 0] = walls[:, -1] = True
    return walls


def _interior_coords(params: StaticParams) -> np.ndarray:
    rows = np.arange(1, params.height - 1)
    cols = np.arange(1, params.width - 1)
    return np.stack(np.meshgrid(rows, cols, indexing="ij"), axis=-1).reshape(-1, 2)


def sample_random_level(rng: RngStream, params: StaticParams) -> MazeLevel:
    """Draw one level. Deterministic in ``rng``; draw order is fixed."""
    g = rng.generator()
    walls = _empty_walls(params)
    interior = _interior_coords(params)

    n_walls = int(g.integers(0, params.wall_budget + 1))
    order = g.permutation(len(interior))
    wall_cells = interior[order[:n_walls]]
    walls[wall_cells[:, 0], wall_cells[:, 1]] = True

    free = interior[order[n_walls:]]
    goal_pos = tuple(free[g.integers(len(free))])
    free = free[~(free == goal_pos).all(axis=1)]
    agent_pos = tuple(free[g.integers(len(free))])
    agent_dir = int(g.integers(4))
    return MazeLevel(walls, agent_pos, agent_dir, goal_pos)


def mutate_level(rng: RngStream, level: MazeLevel, n_mutations: int, params: StaticParams) -> MazeLevel:
    """Apply ``n_mutations`` independent edits to a copy of ``level``.

    Each edit relocates the goal to a uniform free cell with probability
    ``GOAL_RELOCATION_PROB``, otherwise toggles the wall state of a
    uniform interior cell (agent and goal cells are excluded from toggle
    targets, so the result always satisfies level invariants).
    """
    if n_mutations < 1:
        raise ContractViolation(f"n_mutations must be >= 1, got {n_mutations}")
    g = rng.generator()
    walls = level.walls.copy()
    goal_pos = tuple(level.goal_pos)
    agent_pos = tuple(level.agent_pos)
    interior = _interior_coords(params)

    for _ in range(n_mutations):
        if g.random() < GOAL_RELOCATION_PROB:
            free = interior[
                ~walls[interior[:, 0], interior[:, 1]]
                & ~(interior == agent_pos).all(axis=1)
            ]
            goal_pos = tuple(free[g.integers(len(free))])
        else:
            candidates = interior[
                ~(interior == agent_pos).all(axis=1) & ~(interior == goal_pos).all(axis=1)
            ]
            r, c = candidates[g.integers(len(candidates))]
            walls[r, c] = ~walls[r, c]
    return MazeLevel(walls, agent_pos, level.agent_dir, goal_pos)
