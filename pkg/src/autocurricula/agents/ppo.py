"""Clipped-surrogate policy optimization over recurrent policies.

The update path is written once for ``D >= 1`` data-parallel shards: each
shard computes gradients on its own batch, gradients are averaged at a
single synchronization point per minibatch, and every shard applies the
same averaged gradient through its own optimizer. ``D = 1`` is the plain
single-process update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..errors import ConfigError, RunnerFault
from ..rng import RngStream
from .models import init_policy_params
from .rollout import TrajectoryBatch, sample_actions


@dataclass(frozen=True)
class PpoConfig:
    gamma: float = 0.995
    gae_lambda: float = 0.98
    clip_range: float = 0.2
    epochs: int = 5
    minibatches: int = 1
    lr: float = 1e-4
    adam_eps: float = 1e-5
    max_grad_norm: float = 0.5
    value_loss_coef: float = 0.5
    entropy_coef: float = 1e-3
    value_clipping: bool = True
    normalize_advantages: bool = True
    rollout_length: int = 256
    n_envs: int = 32
    bptt_segment: int = 32

    def validate(self) -> "PpoConfig":
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0.0 < self.gae_lambda <= 1.0:
            raise ConfigError(f"gae_lambda must be in (0, 1], got {self.gae_lambda}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.minibatches < 1:
            raise ConfigError(f"minibatches must be >= 1, got {self.minibatches}")
        if self.rollout_length < 1:
            raise ConfigError(f"rollout_length must be >= 1, got {self.rollout_length}")
        if self.n_envs < 1:
            raise ConfigError(f"n_envs must be >= 1, got {self.n_envs}")
        for name in ("clip_range", "lr", "adam_eps", "max_grad_norm", "bptt_segment"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        return self


class PPOAgent:
    """One policy plus its optimizer state."""

    def __init__(self, model, cfg: PpoConfig):
        self.model = model
        self.cfg = cfg
        self.optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr, eps=cfg.adam_eps)
        self.update_count = 0

    @classmethod
    def create(cls, model_factory, cfg: PpoConfig, rng: RngStream, dtype=torch.float32) -> "PPOAgent":
        model = model_factory().to(dtype)
        init_policy_params(model, rng)
        return cls(model, cfg)

    @property
    def dtype(self):
        return next(self.model.parameters()).dtype

    def initial_hidden(self, n: int) -> np.ndarray:
        return self.model.initial_hidden(n).numpy()

    def act(self, obs: dict, hidden: np.ndarray, g=None, greedy: bool = False):
        """Sample (or argmax) actions for flat-lane observations.

        Returns ``(actions, log_probs, values, next_hidden)`` as numpy.
        """
        with torch.no_grad():
            tensors = self.model.prepare(obs)
            logits, value, h = self.model(tensors, torch.from_numpy(hidden))
        logits_np = logits.double().numpy()
        if greedy:
            actions = logits_np.argmax(axis=-1).astype(np.int64)
        else:
            actions = sample_actions(logits_np, g)
        log_probs = log_softmax_np(logits_np)[np.arange(len(actions)), actions]
        return actions, log_probs, value.double().numpy(), h.numpy()

    def values_of(self, obs: dict, hidden: np.ndarray) -> np.ndarray:
        with torch.no_grad():
            _, value, _ = self.model(self.model.prepare(obs), torch.from_numpy(hidden))
        return value.double().numpy()

    def update(self, traj: TrajectoryBatch, advantages, returns, rng: RngStream) -> dict:
        return ppo_update([self], [(traj, advantages, returns)], [rng])

    def param_vector(self) -> np.ndarray:
        with torch.no_grad():
            return torch.cat([p.reshape(-1) for p in self.model.parameters()]).double().numpy()

    def named_arrays(self) -> dict[str, np.ndarray]:
        """Parameters and optimizer moments as float32 arrays (for checkpoints)."""
        out = {}
        with torch.no_grad():
            for name, p in self.model.named_parameters():
                out[name] = p.detach().cpu().float().numpy().copy()
                state = self.optimizer.state.get(p)
                if state:
                    out[f"opt.{name}.exp_avg"] = state["exp_avg"].cpu().float().numpy().copy()
                    out[f"opt.{name}.exp_avg_sq"] = state["exp_avg_sq"].cpu().float().numpy().copy()
                    step = state["step"]
                    step = float(step) if not torch.is_tensor(step) else float(step.item())
                    out[f"opt.{name}.step"] = np.array([step], dtype=np.float32)
        return out

    def load_named_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        with torch.no_grad():
            for name, p in self.model.named_parameters():
                p.copy_(torch.from_numpy(np.asarray(arrays[name])).to(p.dtype))
                if f"opt.{name}.exp_avg" in arrays:
                    state = self.optimizer.state.setdefault(p, {})
                    state["exp_avg"] = torch.from_numpy(arrays[f"opt.{name}.exp_avg"].copy()).to(p.dtype)
                    state["exp_avg_sq"] = torch.from_numpy(arrays[f"opt.{name}.exp_avg_sq"].copy()).to(p.dtype)
                    state["step"] = torch.tensor(float(arrays[f"opt.{name}.step"][0]))


def log_softmax_np(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    return (advantages - advantages.mean()) / (advantages.std() + 1e-8)


@dataclass
class SegmentedBatch:
    """Update tensors reshaped to ``[seg_len, n_chunks * n_lanes, ...]``.

    Column ``c * n_lanes + b`` holds lane ``b``'s chunk ``c``; minibatching
    selects whole lanes, so all chunks of a lane travel together.
    """

    obs: dict[str, torch.Tensor]
    actions: torch.Tensor
    old_log_probs: torch.Tensor
    old_values: torch.Tensor
    advantages: torch.Tensor
    returns: torch.Tensor
    resets: torch.Tensor
    h0: torch.Tensor
    n_lanes: int
    n_chunks: int

    def select_lanes(self, lanes: np.ndarray) -> "SegmentedBatch":
        if len(lanes) == self.n_lanes:
            return self
        cols = (np.arange(self.n_chunks)[:, None] * self.n_lanes + lanes[None, :]).reshape(-1)
        cols = torch.from_numpy(cols)
        pick = lambda t: t.index_select(1, cols)
        return SegmentedBatch(
            {k: pick(v) for k, v in self.obs.items()},
            pick(self.actions),
            pick(self.old_log_probs),
            pick(self.old_values),
            pick(self.advantages),
            pick(self.returns),
            pick(self.resets),
            self.h0.index_select(0, cols),
            len(lanes),
            self.n_chunks,
        )


def segment_batch(model, cfg: PpoConfig, traj: TrajectoryBatch, advantages, returns) -> SegmentedBatch:
    """Chunk the time axis for truncated backprop with stored carries."""
    steps, lanes = traj.actions.shape
    seg = min(cfg.bptt_segment, steps)
    if steps % seg:
        raise ConfigError(f"rollout length {steps} not divisible by bptt_segment {seg}")
    n_chunks = steps // seg
    dtype = next(model.parameters()).dtype

    def chunk(arr: np.ndarray) -> np.ndarray:
        # [T, B, ...] -> [seg, n_chunks * B, ...]
        out = np.ascontiguousarray(arr).reshape(n_chunks, seg, lanes, *arr.shape[2:])
        out = out.swapaxes(0, 1)
        return np.ascontiguousarray(out).reshape(seg, n_chunks * lanes, *arr.shape[2:])

    resets = traj.reset_masks().copy()
    resets[::seg] = False  # chunk-initial carries are stored post-gating
    obs = model.prepare({k: chunk(v) for k, v in traj.obs.items()})
    h0 = torch.from_numpy(
        np.ascontiguousarray(traj.pre_hidden[::seg].reshape(n_chunks * lanes, -1))
    ).to(dtype)
    to_t = lambda a, dt=None: torch.from_numpy(chunk(a)).to(dt) if dt else torch.from_numpy(chunk(a))
    return SegmentedBatch(
        obs,
        to_t(traj.actions),
        to_t(traj.log_probs, dtype),
        to_t(traj.values, dtype),
        to_t(np.asarray(advantages), dtype),
        to_t(np.asarray(returns), dtype),
        to_t(resets),
        h0,
        lanes,
        n_chunks,
    )


def ppo_loss(model, cfg: PpoConfig, mb: SegmentedBatch):
    """Clipped surrogate + clipped value loss - entropy bonus."""
    logits, values = model.forward_sequence(mb.obs, mb.resets, mb.h0)
    log_probs = torch.log_softmax(logits, dim=-1)
    taken = log_probs.gather(-1, mb.actions.unsqueeze(-1)).squeeze(-1)
    ratio = torch.exp(taken - mb.old_log_probs)

    unclipped = ratio * mb.advantages
    clipped = torch.clamp(ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range) * mb.advantages
    policy_loss = -torch.minimum(unclipped, clipped).mean()

    if cfg.value_clipping:
        values_clipped = mb.old_values + torch.clamp(
            values - mb.old_values, -cfg.clip_range, cfg.clip_range
        )
        value_loss = 0.5 * torch.maximum(
            (values - mb.returns) ** 2, (values_clipped - mb.returns) ** 2
        ).mean()
    else:
        value_loss = 0.5 * ((values - mb.returns) ** 2).mean()

    probs = torch.softmax(logits, dim=-1)
    entropy = -(probs * log_probs).sum(-1).mean()

    loss = policy_loss + cfg.value_loss_coef * value_loss - cfg.entropy_coef * entropy
    return loss, {
        "loss": float(loss.detach()),
        "policy_loss": float(policy_loss.detach()),
        "value_loss": float(value_loss.detach()),
        "entropy": float(entropy.detach()),
    }


def shard_minibatch_gradients(agent: PPOAgent, mb: SegmentedBatch):
    """Loss gradients for one shard's minibatch (no optimizer step)."""
    agent.optimizer.zero_grad(set_to_none=True)
    loss, parts = ppo_loss(agent.model, agent.cfg, mb)
    if not np.isfinite(parts["loss"]):
        raise RunnerFault(f"non-finite PPO loss: {parts}")
    loss.backward()
    grads = [
        p.grad.detach() if p.grad is not None else torch.zeros_like(p)
        for p in agent.model.parameters()
    ]
    return grads, parts


def ppo_update(
    agents: list[PPOAgent],
    batches: list[tuple],
    rngs: list[RngStream],
    sync_tol: float = 1e-6,
) -> dict:
    """Run the configured epochs x minibatches over ``D`` shard batches.

    Shard gradients are averaged per minibatch; every shard then applies
    the identical averaged gradient, so parameters stay synchronized
    (checked against ``sync_tol``; bitwise in practice).
    """
    cfg = agents[0].cfg
    n_shards = len(agents)
    prepared = []
    for agent, (traj, advantages, returns) in zip(agents, batches):
        adv = np.asarray(advantages, dtype=np.float64)
        if cfg.normalize_advantages:
            adv = normalize_advantages(adv)
        prepared.append(segment_batch(agent.model, cfg, traj, adv, returns))

    stats_acc: dict[str, float] = {}
    n_terms = 0
    for epoch in range(cfg.epochs):
        lane_groups = []
        for d in range(n_shards):
            lanes = np.arange(prepared[d].n_lanes)
            if cfg.minibatches > 1:
                perm = rngs[d].fold_in(epoch).generator().permutation(lanes)
                lane_groups.append(np.array_split(perm, cfg.minibatches))
            else:
                lane_groups.append([lanes])
        for mb_idx in range(cfg.minibatches):
            shard_grads = []
            for d, agent in enumerate(agents):
                mb = prepared[d].select_lanes(lane_groups[d][mb_idx])
                grads, parts = shard_minibatch_gradients(agent, mb)
                shard_grads.append(grads)
                for k, v in parts.items():
                    stats_acc[k] = stats_acc.get(k, 0.0) + v
                n_terms += 1
            if n_shards > 1:
                with torch.no_grad():
                    mean_grads = [
                        sum(g[i] for g in shard_grads) / n_shards
                        for i in range(len(shard_grads[0]))
                    ]
            for agent in agents:
                if n_shards > 1:
                    with torch.no_grad():
                        for p, grad in zip(agent.model.parameters(), mean_grads):
                            p.grad = grad.clone()
                torch.nn.utils.clip_grad_norm_(agent.model.parameters(), cfg.max_grad_norm)
                agent.optimizer.step()
                agent.optimizer.zero_grad(set_to_none=True)
                agent.update_count += 1
            if n_shards > 1:
                reference = agents[0].param_vector()
                for agent in agents[1:]:
                    drift = float(np.abs(agent.param_vector() - reference).max())
                    if drift > sync_tol:
                        raise RunnerFault(f"shard parameters diverged by {drift:.3e}")

    return {k: v / max(1, n_terms) for k, v in stats_acc.items()}
