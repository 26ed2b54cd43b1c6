"""Environment wrappers. Wrapper state rides in ``StepResult.extras``.

The environment core never reads or writes ``extras``; a rollout loop
passes the previous step's extras back into the wrapper, which is what
lets wrappers carry state across timesteps without touching env state.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from ..rng import RngStream
from .core import StaticParams, StepResult

RESAMPLE = "resample"  # done lanes get a freshly sampled level
HOME = "home"  # done lanes restart their assigned level


class AutoResetWrapper:
    """Restart finished lanes of a batched env within an ongoing rollout.

    On a step where a lane reports done, the returned observation and
    state for that lane belong to the next episode, while reward/done/info
    still describe the terminal transition.
    """

    EXTRAS_KEY = "autoreset"

    def __init__(self, batch_env, mode: str = RESAMPLE):
        if mode not in (RESAMPLE, HOME):
            raise ContractViolation(f"unknown auto-reset mode {mode!r}")
        self.benv = batch_env
        self.mode = mode

    @property
    def shape(self):
        return self.benv.shape

    def action_count(self, params):
        return self.benv.action_count(params)

    def reset(self, rng: RngStream, params: StaticParams) -> StepResult:
        rng_env, rng_wrap = rng.split(2)
        result = self.benv.reset(rng_env, params)
        return self._attach(result, rng_wrap)

    def reset_to_levels(self, rng: RngStream, levels: list, params: StaticParams) -> StepResult:
        rng_env, rng_wrap = rng.split(2)
        result = self.benv.reset_to_levels(rng_env, levels, params)
        return self._attach(result, rng_wrap)

    def _attach(self, result: StepResult, rng_wrap: RngStream) -> StepResult:
        home = self.benv.lane_levels(result.state) if self.mode == HOME else None
        result.extras = dict(result.extras)
        result.extras[self.EXTRAS_KEY] = {"rng": rng_wrap, "step": 0, "home": home}
        return result

    def step(self, rng, state, actions, params: StaticParams, extras: dict) -> StepResult:
        wrap = extras[self.EXTRAS_KEY]
        result = self.benv.step(rng, state, actions, params)
        done_lanes = np.flatnonzero(result.done.reshape(-1))
        if len(done_lanes):
            step_rng = wrap["rng"].fold_in(wrap["step"])
            if self.mode == RESAMPLE:
                levels = [
                    self.benv.env.sample_level(step_rng.fold_in(int(lane)), params)
                    for lane in done_lanes
                ]
            else:
                levels = [wrap["home"][int(lane)] for lane in done_lanes]
            state, fresh_obs = self.benv.reset_lanes(result.state, done_lanes, levels, params)
            result.state = state
            for key, arr in result.observation.items():
                arr.reshape(-1, *arr.shape[2:])[done_lanes] = fresh_obs[key]
        result.extras = dict(extras)
        result.extras[self.EXTRAS_KEY] = {**wrap, "step": wrap["step"] + 1}
        return result
