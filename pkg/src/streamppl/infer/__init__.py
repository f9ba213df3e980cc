"""Inference engines over compiled transition functions."""

from .particle import Particle, ParticleCloud, ess, resample, systematic_indices  # noqa: F401
from .importance import eval_importance  # noqa: F401
from .enumerate import exhaustive_enum  # noqa: F401
from .engines import RunContext, make_engine, pf_infer_step  # noqa: F401
