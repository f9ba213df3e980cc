"""streamppl: a reactive kernel language with streaming Bayesian inference.

Programs are synchronous stream functions; probabilistic models are stream
functions whose per-step posterior is computed by interchangeable inference
engines (importance sampling, particle filtering, and delayed sampling in
naive, bounded, and streaming variants).
"""

from . import dists  # noqa: F401
from .pipeline import front, load  # noqa: F401

__version__ = "0.1.0"
