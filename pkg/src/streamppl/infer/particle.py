"""Particles and resampling.

A particle is a runtime state plus a log weight.  Resampling clones states by
duplication: transition functions externalize all state, so copying the state
tree clones the particle without re-running the model.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DegenerateCloudError
from ..stepfn.alloc import copy_state


class Particle:
    __slots__ = ("state", "log_weight")

    def __init__(self, state, log_weight=0.0):
        self.state = state
        self.log_weight = log_weight


class ParticleCloud:
    __slots__ = ("particles",)

    def __init__(self, particles):
        self.particles = list(particles)

    @property
    def n(self):
        return len(self.particles)

    def log_weights(self):
        return np.array([p.log_weight for p in self.particles])


def normalized_weights(log_weights):
    """exp-normalize log weights; raises if every weight is -inf."""
    log_weights = np.asarray(log_weights, dtype=float)
    m = np.max(log_weights)
    if m == -math.inf or np.isnan(m):
        raise DegenerateCloudError("all particle weights are zero")
    w = np.exp(log_weights - m)
    return w / w.sum()


def log_mean_weight(log_weights):
    """log(mean(exp(w))): the per-step evidence increment."""
    log_weights = np.asarray(log_weights, dtype=float)
    m = np.max(log_weights)
    if m == -math.inf:
        return -math.inf
    return float(m + np.log(np.mean(np.exp(log_weights - m))))


def ess(log_weights) -> float:
    """Effective sample size of normalized weights."""
    w = normalized_weights(log_weights)
    return float(1.0 / np.sum(w * w))


def systematic_indices(weights, n, u):
    """Systematic resampling: n indices drawn with one uniform offset u."""
    positions = (u + np.arange(n)) / n
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, positions, side="right")


def resample(cloud: ParticleCloud, rng) -> ParticleCloud:
    """Systematic resampling proportional to weights; output weights are zero.

    Selected states are duplicated (mutable leaves deep-copied), never
    re-executed.
    """
    particles = cloud.particles
    n = len(particles)
    if n == 1:
        p = particles[0]
        if p.log_weight == -math.inf:
            raise DegenerateCloudError("all particle weights are zero")
        return ParticleCloud([Particle(p.state, 0.0)])
    weights = normalized_weights(cloud.log_weights())
    idx = systematic_indices(weights, n, rng.uniform())
    seen = set()
    out = []
    for i in idx:
        i = int(i)
        if i in seen:
            out.append(Particle(copy_state(particles[i].state), 0.0))
        else:
            seen.add(i)
            out.append(Particle(particles[i].state, 0.0))
    return ParticleCloud(out)
