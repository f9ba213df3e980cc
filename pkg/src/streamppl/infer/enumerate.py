"""Exhaustive enumeration of finite-discrete models.

Every execution path through the finite-support sample sites is expanded with
its exact probability; observations multiply in their likelihood.  This
realizes the normalized measure a model denotes, and serves as the exact
oracle that particle-filter posteriors are tested against.
"""

from __future__ import annotations

import math

from ..dists import Bernoulli, Categorical, Dirac, Distribution
from ..errors import ContinuousSampleError, EnumBudgetError, EvalError
from ..lang.ops import OPS
from ..stepfn.evaldet import bind_pattern
from ..stepfn.terms import (
    TApp,
    TConst,
    TFactor,
    TFun,
    TGlobal,
    TIf,
    TLet,
    TObserve,
    TOp,
    TPairT,
    TSample,
    TTup,
    TVarT,
)


def _support(d: Distribution):
    if isinstance(d, Bernoulli):
        out = []
        if d.p > 0.0:
            out.append((True, math.log(d.p)))
        if d.p < 1.0:
            out.append((False, math.log(1.0 - d.p)))
        return out
    if isinstance(d, Categorical):
        return [(v, math.log(p)) for v, p in zip(d.values, d.probs) if p > 0.0]
    if isinstance(d, Dirac):
        return [(d.value, 0.0)]
    raise ContinuousSampleError(f"{type(d).__name__} has no finite support")


class _Budget:
    __slots__ = ("left",)

    def __init__(self, left):
        self.left = left

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise EnumBudgetError("execution-path budget exceeded")


def _eval_paths(t, env, logw, program, budget):
    """All (value, log weight, env) triples for the paths through `t`."""
    tt = type(t)
    if tt is TVarT:
        return [(env[t.name], logw, env)]
    if tt is TConst:
        return [(t.value, logw, env)]
    if tt is TLet:
        out = []
        for bv, w1, env1 in _eval_paths(t.bound, env, logw, program, budget):
            env2 = dict(env1)
            bind_pattern(t.pat, bv, env2)
            out.extend(_eval_paths(t.body, env2, w1, program, budget))
        return out
    if tt is TOp:
        info = OPS[t.op]
        out = []
        for av, w1, env1 in _eval_paths(t.arg, env, logw, program, budget):
            if info.arity == 1:
                v = info.fn(av)
            elif info.arity == 2:
                v = info.fn(av[0], av[1])
            else:
                v = info.fn(av[0], av[1][0], av[1][1])
            out.append((v, w1, env1))
        return out
    if tt is TSample:
        out = []
        for dv, w1, env1 in _eval_paths(t.arg, env, logw, program, budget):
            for v, lp in _support(dv):
                budget.spend()
                out.append((v, w1 + lp, env1))
        return out
    if tt is TObserve:
        out = []
        for dv, w1, env1 in _eval_paths(t.dist, env, logw, program, budget):
            for vv, w2, env2 in _eval_paths(t.value, env1, w1, program, budget):
                lp = dv.log_pdf(vv)
                if lp > -math.inf:
                    out.append(((), w2 + lp, env2))
        return out
    if tt is TFactor:
        return [
            ((), w1 + float(v), env1)
            for v, w1, env1 in _eval_paths(t.arg, env, logw, program, budget)
        ]
    if tt is TPairT:
        out = []
        for v1, w1, env1 in _eval_paths(t.fst, env, logw, program, budget):
            for v2, w2, env2 in _eval_paths(t.snd, env1, w1, program, budget):
                out.append(((v1, v2), w2, env2))
        return out
    if tt is TTup:
        outs = [((), logw, env)]
        for item in t.items:
            nxt = []
            for acc, w1, env1 in outs:
                for v, w2, env2 in _eval_paths(item, env1, w1, program, budget):
                    nxt.append((acc + (v,), w2, env2))
            outs = nxt
        return outs
    if tt is TIf:
        out = []
        for cv, w1, env1 in _eval_paths(t.cond, env, logw, program, budget):
            branch = t.then if cv else t.els
            out.extend(_eval_paths(branch, env1, w1, program, budget))
        return out
    if tt is TApp:
        fn = t.fn
        if type(fn) is TGlobal:
            fn = program.defs[fn.name]
        out = []
        for av, w1, env1 in _eval_paths(t.arg, env, logw, program, budget):
            call_env = program.base_env()
            bind_pattern(fn.pat, av, call_env)
            for v, w2, _env2 in _eval_paths(fn.body, call_env, w1, program, budget):
                out.append((v, w2, env1))
        return out
    if tt is TFun:
        return [(t, logw, env)]
    if tt is TGlobal:
        return [(program.defs[t.name], logw, env)]
    raise EvalError(f"cannot enumerate {type(t).__name__}")


def _freeze(v):
    if isinstance(v, tuple):
        return tuple(_freeze(x) for x in v)
    return v


def exhaustive_enum(model, steps, program, state0, inputs=None, env=None, path_budget=100_000):
    """Exact per-step result distributions of a finite-discrete model.

    `model` is a compiled transition function over (state, input) pairs.
    Returns a list of dicts {result value: probability}, one per step,
    normalized exactly.
    """
    base = dict(env) if env else (program.base_env() if program else {})
    paths = [(state0, 0.0)]
    results = []
    budget = _Budget(path_budget)
    for t in range(steps):
        inp = inputs[t] if inputs is not None else ()
        mass = {}
        nxt = []
        for state, logw in paths:
            call_env = dict(base)
            bind_pattern(model.pat, (state, inp), call_env)
            for (v, s2), w, _e in _eval_paths(model.body, call_env, logw, program, budget):
                nxt.append((s2, w))
                key = _freeze(v)
                mass[key] = mass.get(key, 0.0) + math.exp(w)
        total = sum(mass.values())
        if total <= 0.0:
            raise EvalError("all enumeration paths have zero probability")
        results.append({k: p / total for k, p in mass.items()})
        paths = nxt
    return results
