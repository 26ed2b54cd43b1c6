"""Recurrent policy networks for maze agents and level designers.

Both policies share the same trunk: embed the tile observation, pass it
with auxiliary features through a dense encoder, carry a gated recurrent
cell, and read out action logits and a value estimate. Parameters are
initialized deterministically from an :class:`RngStream` (orthogonal for
dense and recurrent weights, small-gain orthogonal for the heads, zero
biases), so identical seeds give identical networks regardless of torch
global state.
"""

from __future__ import annotations

import math

import numpy as np
import torch
from torch import nn

from ..env.core import StaticParams
from ..rng import RngStream
from ..amaze.env import N_TILE_CODES


def orthogonal_(g: np.random.Generator, tensor: torch.Tensor, gain: float) -> None:
    """Orthogonal init computed in numpy for seed-stable parameters."""
    rows, cols = tensor.shape
    flat = g.normal(size=(max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(flat)
    q = q * np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    with torch.no_grad():
        tensor.copy_(torch.from_numpy(gain * q[:rows, :cols]).to(tensor.dtype))


def init_policy_params(module: nn.Module, rng: RngStream, head_gain: float = 0.01) -> None:
    g = rng.generator()
    for name, p in module.named_parameters():
        if "bias" in name or p.dim() < 2:
            with torch.no_grad():
                p.zero_()
        elif "embed" in name:
            with torch.no_grad():
                p.copy_(torch.from_numpy(g.normal(size=tuple(p.shape))).to(p.dtype))
        elif "head" in name:
            orthogonal_(g, p, head_gain)
        else:
            orthogonal_(g, p, math.sqrt(2.0))


class RecurrentTrunk(nn.Module):
    """Dense encoder + gated recurrent cell + policy/value heads."""

    def __init__(self, in_dim: int, n_actions: int, encoder_dim: int, hidden_dim: int):
        super().__init__()
        self.encoder = nn.Linear(in_dim, encoder_dim)
        self.cell = nn.GRUCell(encoder_dim, hidden_dim)
        self.policy_head = nn.Linear(hidden_dim, n_actions)
        self.value_head = nn.Linear(hidden_dim, 1)
        self.hidden_dim = hidden_dim
        self.n_actions = n_actions

    def forward(self, features: torch.Tensor, hidden: torch.Tensor):
        x = torch.relu(self.encoder(features))
        hidden = self.cell(x, hidden)
        return self.policy_head(hidden), self.value_head(hidden).squeeze(-1), hidden


class _PolicyBase(nn.Module):
    def initial_hidden(self, n: int) -> torch.Tensor:
        p = next(self.parameters())
        return torch.zeros(n, self.trunk.hidden_dim, dtype=p.dtype, device=p.device)

    @property
    def n_actions(self) -> int:
        return self.trunk.n_actions

    def forward(self, obs: dict[str, torch.Tensor], hidden: torch.Tensor):
        return self.trunk(self.features(obs), hidden)

    def forward_sequence(self, obs: dict[str, torch.Tensor], resets: torch.Tensor, hidden: torch.Tensor):
        """Run ``T`` steps; ``resets[t]`` zeroes the carry before step ``t``.

        ``obs`` arrays are time-major ``[T, B, ...]``; returns logits
        ``[T, B, A]`` and values ``[T, B]``.
        """
        feats = self.features(obs)
        steps = feats.shape[0]
        logits, values = [], []
        for t in range(steps):
            hidden = hidden * (~resets[t]).to(hidden.dtype).unsqueeze(-1)
            lg, v, hidden = self.trunk(feats[t], hidden)
            logits.append(lg)
            values.append(v)
        return torch.stack(logits), torch.stack(values)


class MazePolicy(_PolicyBase):
    """Student policy over egocentric views plus facing direction."""

    def __init__(
        self,
        view_size: int,
        n_actions: int = 3,
        tile_embed_dim: int = 8,
        dir_embed_dim: int = 4,
        encoder_dim: int = 128,
        hidden_dim: int = 256,
    ):
        super().__init__()
        self.tile_embed = nn.Embedding(N_TILE_CODES, tile_embed_dim)
        self.dir_embed = nn.Embedding(4, dir_embed_dim)
        in_dim = view_size * view_size * tile_embed_dim + dir_embed_dim
        self.trunk = RecurrentTrunk(in_dim, n_actions, encoder_dim, hidden_dim)

    def prepare(self, obs: dict[str, np.ndarray]) -> dict[str, torch.Tensor]:
        return {
            "view": torch.from_numpy(np.ascontiguousarray(obs["view"])).long(),
            "dir": torch.from_numpy(np.ascontiguousarray(obs["dir"])).long(),
        }

    def features(self, obs: dict[str, torch.Tensor]) -> torch.Tensor:
        tiles = self.tile_embed(obs["view"]).flatten(start_dim=obs["view"].dim() - 2)
        return torch.cat([tiles, self.dir_embed(obs["dir"])], dim=-1)


class DesignerPolicy(_PolicyBase):
    """Teacher policy over the full design grid, phase, and placement count."""

    def __init__(
        self,
        params: StaticParams,
        tile_embed_dim: int = 8,
        encoder_dim: int = 128,
        hidden_dim: int = 256,
    ):
        super().__init__()
        self.tile_embed = nn.Embedding(N_TILE_CODES, tile_embed_dim)
        self.count_scale = 1.0 / max(1, params.wall_budget)
        in_dim = params.height * params.width * tile_embed_dim + 4 + 1
        n_actions = params.n_interior
        self.trunk = RecurrentTrunk(in_dim, n_actions, encoder_dim, hidden_dim)

    def prepare(self, obs: dict[str, np.ndarray]) -> dict[str, torch.Tensor]:
        dtype = next(self.parameters()).dtype
        return {
            "grid": torch.from_numpy(np.ascontiguousarray(obs["grid"])).long(),
            "phase": torch.from_numpy(np.ascontiguousarray(obs["phase"])).to(dtype),
            "n_placed": torch.from_numpy(np.ascontiguousarray(obs["n_placed"])).to(dtype),
        }

    def features(self, obs: dict[str, torch.Tensor]) -> torch.Tensor:
        tiles = self.tile_embed(obs["grid"]).flatten(start_dim=obs["grid"].dim() - 2)
        count = (obs["n_placed"] * self.count_scale).unsqueeze(-1)
        return torch.cat([tiles, obs["phase"], count], dim=-1)
