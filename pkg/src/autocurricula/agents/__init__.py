from .checkpoint import read_container, write_container
from .gae import compute_gae
from .models import DesignerPolicy, MazePolicy, init_policy_params
from .population import AgentPop
from .ppo import PPOAgent, PpoConfig, normalize_advantages, ppo_loss, ppo_update, segment_batch
from .rollout import RolloutCursor, TrajectoryBatch, flatten_obs, per_lane_episode_stats, rollout

__all__ = [
    "AgentPop",
    "DesignerPolicy",
    "MazePolicy",
    "PPOAgent",
    "PpoConfig",
    "RolloutCursor",
    "TrajectoryBatch",
    "compute_gae",
    "flatten_obs",
    "init_policy_params",
    "normalize_advantages",
    "per_lane_episode_stats",
    "ppo_loss",
    "ppo_update",
    "read_container",
    "rollout",
    "segment_batch",
    "write_container",
]
