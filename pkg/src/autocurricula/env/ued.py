"""Paired student/teacher environments for adaptive level design.

The teacher runs its design episodes in its own decision process; once a
design is finished, ``reset_student`` places the student inside the
resulting instance.
"""

from __future__ import annotations

from ..errors import ContractViolation
from ..rng import RngStream
from .batch import batch_lift
from .core import BatchShape, Environment, StaticParams, StepResult


class UEDEnvPair:
    """Single-instance student/teacher pair."""

    def __init__(self, student_env: Environment, teacher_env: Environment):
        self.student = student_env
        self.teacher = teacher_env

    def reset_teacher(self, rng: RngStream, params: StaticParams) -> StepResult:
        return self.teacher.reset(rng, params)

    def step_teacher(self, rng, state, action, params: StaticParams) -> StepResult:
        return self.teacher.step(rng, state, action, params)

    def reset_student(self, rng: RngStream, teacher_final_state, params: StaticParams) -> StepResult:
        if not teacher_final_state.terminal:
            raise ContractViolation("teacher design episode is not finished")
        level = self.teacher.designed_level(teacher_final_state)
        return self.student.reset_to_level(rng, level, params)


class BatchUEDEnv:
    """Batched pair: teacher designs ``n_envs`` instances, students play them.

    The student batch replicates each designed level across the agent
    (population) and eval dimensions.
    """

    def __init__(self, student_env: Environment, teacher_env: Environment, shape: BatchShape):
        self.shape = shape
        self.student_env = student_env
        self.teacher_env = teacher_env
        self.student = batch_lift(student_env, shape)
        self.teacher = batch_lift(teacher_env, BatchShape(1, 1, shape.n_envs))

    def reset_teacher(self, rng: RngStream, params: StaticParams) -> StepResult:
        return self.teacher.reset(rng, params)

    def step_teacher(self, rng, state, actions, params: StaticParams) -> StepResult:
        return self.teacher.step(rng, state, actions, params)

    def designed_levels(self, teacher_state) -> list:
        states = teacher_state if isinstance(teacher_state, list) else [
            teacher_state.state_at(i) for i in range(len(teacher_state))
        ]
        if not all(s.terminal for s in states):
            raise ContractViolation("teacher design episodes are not all finished")
        return [self.teacher_env.designed_level(s) for s in states]

    def reset_student(self, rng: RngStream, teacher_state, params: StaticParams) -> StepResult:
        return self.student.reset_to_levels(rng, self.designed_levels(teacher_state), params)
