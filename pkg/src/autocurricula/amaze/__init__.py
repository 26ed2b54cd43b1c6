from .env import Action, EnvState, MazeEnv, Observation, compute_reward, observe, transition
from .generator import mutate_level, sample_random_level
from .level import (
    Direction,
    MazeLevel,
    asset_names,
    asset_text,
    decode_level,
    encode_level,
    load_asset,
)
from .metrics import EnvMetrics, env_metrics
from .pathfinding import bfs_apsp, connected_components, seidel_apsp
from .teacher import (
    DesignPhase,
    TeacherEnv,
    TeacherObservation,
    TeacherState,
    decode_teacher_level,
    teacher_observe,
    teacher_step,
)

__all__ = [
    "Action",
    "DesignPhase",
    "Direction",
    "EnvMetrics",
    "EnvState",
    "MazeEnv",
    "MazeLevel",
    "Observation",
    "TeacherEnv",
    "TeacherObservation",
    "TeacherState",
    "asset_names",
    "asset_text",
    "bfs_apsp",
    "compute_reward",
    "connected_components",
    "decode_level",
    "decode_teacher_level",
    "encode_level",
    "env_metrics",
    "load_asset",
    "mutate_level",
    "observe",
    "sample_random_level",
    "seidel_apsp",
    "teacher_observe",
    "teacher_step",
    "transition",
]
