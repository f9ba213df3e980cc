"""Inference engines and the run context that wires them to `infer` sites.

An engine owns a cloud of particles that represents the distribution of
model states.  Each step, every particle advances through the model's
transition function, the weighted results become the emitted distribution,
and the cloud is rebuilt for the next step (resampled for the particle
filter, weight-carrying for plain importance sampling).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..dists import Categorical
from ..errors import EvalError
from ..rng import RESAMPLE_STREAM, StreamRng
from ..stepfn.alloc import EngineState, copy_state
from ..stepfn.evaldet import bind_pattern
from .importance import WeightCtx, eval_imp
from .particle import (
    Particle,
    ParticleCloud,
    ess,
    log_mean_weight,
    normalized_weights,
    resample,
)

PARTICLE_STREAM = 0xA11CE

_NO_ARG = object()


class RunContext:
    """Per-run configuration shared by every inference site."""

    def __init__(
        self,
        program,
        engine="pf",
        seed=0,
        workers=1,
        ess_resampling=False,
        particles_override=None,
    ):
        self.program = program
        self.engine_name = engine
        self.seed = seed
        self.workers = workers
        self.ess_resampling = ess_resampling
        self.particles_override = particles_override
        self.step_index = 0
        self.counters = {"snapshot_fallbacks": 0}
        self.infer_infos = []
        self.pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()
            self.pool = None

    def map_particles(self, fn, n):
        if self.pool is not None:
            return list(self.pool.map(fn, range(n)))
        return [fn(i) for i in range(n)]

    def step_infer(self, tinfer, engine_state, env):
        if not isinstance(engine_state, EngineState):
            raise EvalError("infer applied to a non-engine state")
        if engine_state.engine is None:
            engine_state.engine = make_engine(self.engine_name)
            n = self.particles_override or engine_state.particles_requested
            engine_state.cloud = engine_state.engine.init_cloud(n, engine_state.model_state0)
        dist, cloud, info = engine_state.engine.step(
            tinfer.model, engine_state.cloud, env, self
        )
        nxt = EngineState(engine_state.particles_requested, engine_state.model_state0)
        nxt.engine = engine_state.engine
        nxt.cloud = cloud
        self.infer_infos.append(info)
        return dist, nxt


class PfEngine:
    """Particle filter; with `cumulative` the weights persist and nothing is
    resampled, which is plain importance sampling (a diagnostic mode)."""

    def __init__(self, cumulative=False):
        self.cumulative = cumulative
        self._last_log_evidence = 0.0

    def init_cloud(self, n, state0):
        return ParticleCloud([Particle(copy_state(state0), 0.0) for _ in range(n)])

    def copy_cloud(self, cloud):
        return ParticleCloud(
            [Particle(copy_state(p.state), p.log_weight) for p in cloud.particles]
        )

    def live_nodes(self, cloud):
        return 0

    def step(self, model_fun, cloud, env, ctx, arg=_NO_ARG):
        particles = cloud.particles
        n = len(particles)

        def work(i):
            p = particles[i]
            rng = StreamRng(ctx.seed, PARTICLE_STREAM, i, ctx.step_index)
            w = WeightCtx(p.log_weight, rng, ctx)
            env_i = dict(env)
            val = p.state if arg is _NO_ARG else (p.state, arg)
            bind_pattern(model_fun.pat, val, env_i)
            v, s2 = eval_imp(model_fun.body, env_i, w)
            return v, s2, w.log_weight

        stepped = ctx.map_particles(work, n)
        log_ws = np.array([r[2] for r in stepped])
        probs = normalized_weights(log_ws)
        dist = Categorical(tuple(r[0] for r in stepped), tuple(probs))

        if self.cumulative:
            total = log_mean_weight(log_ws)
            info = {"log_evidence_inc": total - self._last_log_evidence, "live_nodes": 0}
            self._last_log_evidence = total
            nxt = ParticleCloud([Particle(s2, lw) for (_, s2, lw) in stepped])
            return dist, nxt, info

        info = {"log_evidence_inc": log_mean_weight(log_ws), "live_nodes": 0}
        nxt = ParticleCloud([Particle(s2, lw) for (_, s2, lw) in stepped])
        if not ctx.ess_resampling or ess(log_ws) < n / 2.0:
            nxt = resample(nxt, StreamRng(ctx.seed, RESAMPLE_STREAM, ctx.step_index))
        return dist, nxt, info


def pf_infer_step(model_fun, cloud, env, ctx, arg=_NO_ARG):
    """One particle-filter step: (result distribution, resampled next cloud)."""
    engine = PfEngine()
    dist, nxt, _info = engine.step(model_fun, cloud, env, ctx, arg)
    return dist, nxt


def make_engine(name):
    if name == "pf":
        return PfEngine()
    if name == "is":
        return PfEngine(cumulative=True)
    if name in ("ds", "bds", "sds"):
        from ..ds.engine import DsEngine

        return DsEngine(name)
    raise EvalError(f"unknown inference engine {name!r}")
