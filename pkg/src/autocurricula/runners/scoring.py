"""Regret score estimators for level curation.

``score_pvl`` is the positive-value-loss estimator: the mean clipped-
positive advantage over a level's experience. ``score_maxmc`` is the
maximum-Monte-Carlo estimator: the mean gap between the best return ever
observed on the level and the value predictions along the trajectory.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from .buffer import PlrConfig
from ..agents.rollout import TrajectoryBatch


def score_pvl(advantages: np.ndarray) -> float:
    """Mean positive advantage over one level's trajectory slice."""
    advantages = np.asarray(advantages, dtype=np.float64)
    if advantages.size == 0:
        raise ContractViolation("cannot score an empty trajectory slice")
    return float(np.maximum(advantages, 0.0).mean())


def score_maxmc(values: np.ndarray, max_return: float) -> float:
    """Mean (max observed return - value estimate) over one slice."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ContractViolation("cannot score an empty trajectory slice")
    return float((max_return - values).mean())


def lane_scores(
    traj: TrajectoryBatch,
    advantages: np.ndarray,
    prior_max_returns: np.ndarray,
    cfg: PlrConfig,
    gamma: float = 1.0,
    episode_stats: dict | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-lane curation scores and updated running-max returns.

    ``prior_max_returns`` carries the buffer's running max per lane's
    level; the max is advanced with this rollout's episodes first, then
    scored. Scores are clamped at zero (buffer entries are nonnegative).
    """
    from ..agents.rollout import per_lane_episode_stats

    if episode_stats is None:
        episode_stats = per_lane_episode_stats(
            traj.rewards, traj.dones, gamma=gamma if cfg.maxmc_discounted else 1.0
        )
    max_returns = np.maximum(np.asarray(prior_max_returns, dtype=np.float64),
                             episode_stats["max_return"])
    n_lanes = traj.n_lanes
    scores = np.empty(n_lanes)
    for lane in range(n_lanes):
        if cfg.score_fn == "pvl":
            scores[lane] = score_pvl(advantages[:, lane])
        else:
            scores[lane] = score_maxmc(traj.values[:, lane], max_returns[lane])
    return np.maximum(scores, 0.0), max_returns
