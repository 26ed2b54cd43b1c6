from .batch import GenericBatchEnv, VectorBatchEnv, batch_lift
from .core import BatchShape, Environment, StaticParams, StepResult
from .ued import BatchUEDEnv, UEDEnvPair
from .wrappers import HOME, RESAMPLE, AutoResetWrapper

__all__ = [
    "AutoResetWrapper",
    "BatchShape",
    "BatchUEDEnv",
    "Environment",
    "GenericBatchEnv",
    "HOME",
    "RESAMPLE",
    "StaticParams",
    "StepResult",
    "UEDEnvPair",
    "VectorBatchEnv",
    "batch_lift",
]
