"""Per-level environment metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .level import MazeLevel
from .pathfinding import grid_distances_from


@dataclass(frozen=True)
class EnvMetrics:
    n_walls: int  # interior walls only
    shortest_path_length: int  # agent -> goal, 0 if unsolvable
    solvable: bool
    passable_ratio: float  # fraction of interior cells that are non-wall


def env_metrics(level: MazeLevel) -> EnvMetrics:
    dist = grid_distances_from(level.walls, tuple(level.agent_pos))
    d = dist[tuple(level.goal_pos)]
    solvable = bool(np.isfinite(d))
    interior = level.walls[1:-1, 1:-1]
    return EnvMetrics(
        n_walls=int(interior.sum()),
        shortest_path_length=int(d) if solvable else 0,
        solvable=solvable,
        passable_ratio=float(1.0 - interior.mean()),
    )
