"""Importance-sampling evaluation of compiled transition functions.

`sample` draws a concrete value without touching the weight, `observe` adds
the observation's log likelihood, and `factor` adds its argument directly;
weights live in log space because raw path probabilities vanish after a few
steps of a never-terminating process.
"""

from __future__ import annotations

from ..dists import Distribution
from ..errors import DensityUnavailableError, EvalError
from ..lang.ops import OPS
from ..stepfn.alloc import copy_state
from ..stepfn.evaldet import bind_pattern
from ..stepfn.terms import (
    TApp,
    TConst,
    TFactor,
    TFun,
    TGlobal,
    TIf,
    TInfer,
    TLet,
    TObserve,
    TOp,
    TPairT,
    TSample,
    TTup,
    TVarT,
)


class WeightCtx:
    """Per-particle evaluation context: accumulated log weight and rng."""

    __slots__ = ("log_weight", "rng", "run")

    def __init__(self, log_weight, rng, run=None):
        self.log_weight = log_weight
        self.rng = rng
        self.run = run  # enclosing RunContext, for nested infer


def eval_imp(t, env, w: WeightCtx):
    while True:
        tt = type(t)
        if tt is TVarT:
            return env[t.name]
        if tt is TConst:
            return t.value
        if tt is TLet:
            bind_pattern(t.pat, eval_imp(t.bound, env, w), env)
            t = t.body
            continue
        if tt is TOp:
            if t.op == "__copy_state":
                return copy_state(eval_imp(t.arg, env, w))
            arg = eval_imp(t.arg, env, w)
            info = OPS[t.op]
            if info.arity == 1:
                return info.fn(arg)
            if info.arity == 2:
                return info.fn(arg[0], arg[1])
            return info.fn(arg[0], arg[1][0], arg[1][1])
        if tt is TSample:
            d = eval_imp(t.arg, env, w)
            if not isinstance(d, Distribution):
                raise EvalError("sample applied to a non-distribution value")
            return d.draw(w.rng)
        if tt is TObserve:
            d = eval_imp(t.dist, env, w)
            v = eval_imp(t.value, env, w)
            if not d.has_density():
                raise DensityUnavailableError("observe needs a distribution with a density")
            w.log_weight += d.log_pdf(v)
            return ()
        if tt is TFactor:
            w.log_weight += float(eval_imp(t.arg, env, w))
            return ()
        if tt is TPairT:
            return (eval_imp(t.fst, env, w), eval_imp(t.snd, env, w))
        if tt is TTup:
            return tuple(eval_imp(x, env, w) for x in t.items)
        if tt is TIf:
            t = t.then if eval_imp(t.cond, env, w) else t.els
            continue
        if tt is TApp:
            fn = t.fn
            if type(fn) is TGlobal:
                fn = w.run.program.defs[fn.name]
            elif type(fn) is not TFun:
                fn = eval_imp(fn, env, w)
            arg = eval_imp(t.arg, env, w)
            call_env = w.run.program.base_env()
            bind_pattern(fn.pat, arg, call_env)
            t = fn.body
            env = call_env
            continue
        if tt is TInfer:
            engine_state = eval_imp(t.state, env, w)
            return w.run.step_infer(t, engine_state, env)
        if tt is TFun:
            return t
        if tt is TGlobal:
            return w.run.program.defs[t.name]
        raise EvalError(f"unknown term {type(t).__name__}")


def eval_importance(term, state, env, log_weight, rng, run=None):
    """Evaluate a compiled transition function as an importance sampler.

    Returns (value, next state, accumulated log weight).
    """
    if type(term) is not TFun:
        raise EvalError("eval_importance expects a compiled transition function")
    w = WeightCtx(log_weight, rng, run)
    e = dict(env) if env else {}
    bind_pattern(term.pat, state, e)
    value, state_out = eval_imp(term.body, e, w)
    return value, state_out, w.log_weight
