"""Generalized advantage estimation."""

from __future__ import annotations

import numpy as np


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    last_value: np.ndarray,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Advantages and value targets over time-major ``[T, B]`` arrays.

    delta_t = r_t + gamma * (1 - done_t) * V_{t+1} - V_t
    A_t     = delta_t + gamma * lam * (1 - done_t) * A_{t+1}
    returns = A + V

    Done flags gate both terms, so nothing leaks across episode
    boundaries. Computed in float64.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    not_done = 1.0 - np.asarray(dones, dtype=np.float64)
    steps = rewards.shape[0]

    advantages = np.zeros_like(rewards)
    gae = np.zeros_like(np.asarray(last_value, dtype=np.float64))
    for t in range(steps - 1, -1, -1):
        next_value = values[t + 1] if t + 1 < steps else np.asarray(last_value, dtype=np.float64)
        delta = rewards[t] + gamma * not_done[t] * next_value - values[t]
        gae = delta + gamma * lam * not_done[t] * gae
        advantages[t] = gae
    return advantages, advantages + values
