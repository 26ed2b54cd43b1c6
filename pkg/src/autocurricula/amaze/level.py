"""Maze levels: the free parameters of the environment, plus their text codec.

A level is a wall bitmap with an agent pose and a goal cell. The text
format is one row per line: ``#`` wall, ``.`` empty, ``G`` goal, and one
of ``^ > v <`` for the agent (facing north/east/south/west respectively).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from importlib import resources

import numpy as np

from ..errors import LevelError, LevelParseError


class Direction(IntEnum):
    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3


# (dr, dc) per direction, clockwise from north
DIR_VECTORS = np.array([(-1, 0), (0, 1), (1, 0), (0, -1)], dtype=np.int64)

AGENT_CHARS = {Direction.NORTH: "^", Direction.EAST: ">", Direction.SOUTH: "v", Direction.WEST: "<"}
CHAR_DIRS = {v: k for k, v in AGENT_CHARS.items()}


@dataclass
class MazeLevel:
    """A fully specified maze instance."""

    walls: np.ndarray  # bool [H, W], True = wall
    agent_pos: tuple[int, int]
    agent_dir: int
    goal_pos: tuple[int, int]

    @property
    def height(self) -> int:
        return self.walls.shape[0]

    @property
    def width(self) -> int:
        return self.walls.shape[1]

    def validate(self) -> "MazeLevel":
        h, w = self.walls.shape
        if h < 3 or w < 3:
            raise LevelError(f"level must be at least 3x3, got {h}x{w}")
        border = np.concatenate([self.walls[0], self.walls[-1], self.walls[:, 0], self.walls[:, -1]])
        if not border.all():
            raise LevelError("border cells must all be walls")
        for name, (r, c) in (("agent", self.agent_pos), ("goal", self.goal_pos)):
            if not (0 < r < h - 1 and 0 < c < w - 1):
                raise LevelError(f"{name} position {(r, c)} is not an interior cell")
            if self.walls[r, c]:
                raise LevelError(f"{name} position {(r, c)} is a wall cell")
        if tuple(self.agent_pos) == tuple(self.goal_pos):
            raise LevelError(f"agent and goal share cell {tuple(self.agent_pos)}")
        if self.agent_dir not in (0, 1, 2, 3):
            raise LevelError(f"agent_dir must be in 0..3, got {self.agent_dir}")
        return self

    def key(self) -> bytes:
        """Identity key: exact tile map including agent pose."""
        pose = np.array([*self.agent_pos, self.agent_dir, *self.goal_pos], dtype=np.int64)
        return np.packbits(self.walls).tobytes() + pose.tobytes()

    def copy(self) -> "MazeLevel":
        return MazeLevel(self.walls.copy(), tuple(self.agent_pos), int(self.agent_dir), tuple(self.goal_pos))

    def n_interior_walls(self) -> int:
        return int(self.walls[1:-1, 1:-1].sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, MazeLevel) and self.key() == other.key()


def encode_level(level: MazeLevel) -> str:
    """Render a level as grid text (inverse of ``decode_level``)."""
    h, w = level.walls.shape
    rows = []
    for r in range(h):
        chars = []
        for c in range(w):
            if (r, c) == tuple(level.agent_pos):
                chars.append(AGENT_CHARS[Direction(level.agent_dir)])
            elif (r, c) == tuple(level.goal_pos):
                chars.append("G")
            else:
                chars.append("#" if level.walls[r, c] else ".")
        rows.append("".join(chars))
    return "\n".join(rows) + "\n"


def decode_level(text: str, expected_shape: tuple[int, int] | None = None) -> MazeLevel:
    """Parse grid text into a validated level.

    ``expected_shape`` (height, width), when given, rejects grids of any
    other size. Raises :class:`LevelParseError` with 1-based line/column
    on malformed input.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise LevelParseError("empty level text", 1, 1)
    h = len(lines)
    w = len(lines[0])
    for i, ln in enumerate(lines):
        if len(ln) != w:
            raise LevelParseError(f"row has length {len(ln)}, expected {w}", i + 1, len(ln) + 1)
    if expected_shape is not None and (h, w) != tuple(expected_shape):
        raise LevelParseError(
            f"level is {h}x{w}, expected {expected_shape[0]}x{expected_shape[1]}", 1, 1
        )

    walls = np.zeros((h, w), dtype=bool)
    agent_pos = agent_dir = goal_pos = None
    for r, ln in enumerate(lines):
        for c, ch in enumerate(ln):
            if ch == "#":
                walls[r, c] = True
            elif ch == ".":
                pass
            elif ch == "G":
                if goal_pos is not None:
                    raise LevelParseError("duplicate goal", r + 1, c + 1)
                goal_pos = (r, c)
            elif ch in CHAR_DIRS:
                if agent_pos is not None:
                    raise LevelParseError("duplicate agent", r + 1, c + 1)
                agent_pos = (r, c)
                agent_dir = int(CHAR_DIRS[ch])
            else:
                raise LevelParseError(f"illegal character {ch!r}", r + 1, c + 1)
    if agent_pos is None:
        raise LevelParseError("missing agent", h, w)
    if goal_pos is None:
        raise LevelParseError("missing goal", h, w)

    try:
        return MazeLevel(walls, agent_pos, agent_dir, goal_pos).validate()
    except LevelError as e:
        raise LevelParseError(str(e), 1, 1) from e


def asset_names() -> list[str]:
    """Names of the levels shipped with the package."""
    pkg = resources.files(__package__) / "assets"
    return sorted(p.name[: -len(".txt")] for p in pkg.iterdir() if p.name.endswith(".txt"))


def load_asset(name: str) -> MazeLevel:
    """Load a shipped level by name (see ``asset_names``)."""
    pkg = resources.files(__package__) / "assets"
    path = pkg / f"{name}.txt"
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise LevelError(f"unknown shipped level {name!r}; available: {', '.join(asset_names())}")
    return decode_level(text)


def asset_text(name: str) -> str:
    pkg = resources.files(__package__) / "assets"
    return (pkg / f"{name}.txt").read_text()
