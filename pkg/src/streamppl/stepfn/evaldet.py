"""Strict deterministic evaluation of compiled transition functions.

Probabilistic terms are unreachable here by kind soundness; hitting one is an
internal error.  `infer` is deterministic and delegates to the inference
context supplied by the run.
"""

from __future__ import annotations

from ..errors import EvalError, KindError, ShapeError
from ..lang.ops import OPS
from .alloc import copy_state
from .terms import (
    PP,
    PT,
    PV,
    PW,
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


def bind_pattern(pat, val, env):
    tp = type(pat)
    if tp is PV:
        env[pat.name] = val
    elif tp is PP:
        bind_pattern(pat.fst, val[0], env)
        bind_pattern(pat.snd, val[1], env)
    elif tp is PT:
        items = pat.items
        if len(items) != len(val):
            raise ShapeError(f"state tuple of length {len(val)} does not match {pat!r}")
        for p, v in zip(items, val):
            bind_pattern(p, v, env)
    elif tp is PW:
        pass
    else:
        raise ShapeError(f"unknown pattern {pat!r}")


def apply_op(op, arg):
    info = OPS.get(op)
    if info is None:
        raise EvalError(f"unknown operator {op!r}")
    if info.arity == 1:
        return info.fn(arg)
    if info.arity == 2:
        return info.fn(arg[0], arg[1])
    return info.fn(arg[0], arg[1][0], arg[1][1])


def eval_term(t, env, ctx):
    while True:
        tt = type(t)
        if tt is TVarT:
            return env[t.name]
        if tt is TConst:
            return t.value
        if tt is TLet:
            bind_pattern(t.pat, eval_term(t.bound, env, ctx), env)
            t = t.body
            continue
        if tt is TOp:
            if t.op == "__copy_state":
                return copy_state(eval_term(t.arg, env, ctx))
            return apply_op(t.op, eval_term(t.arg, env, ctx))
        if tt is TPairT:
            return (eval_term(t.fst, env, ctx), eval_term(t.snd, env, ctx))
        if tt is TTup:
            return tuple(eval_term(x, env, ctx) for x in t.items)
        if tt is TIf:
            t = t.then if eval_term(t.cond, env, ctx) else t.els
            continue
        if tt is TApp:
            fn = t.fn
            if type(fn) is TGlobal:
                fn = ctx.program.defs[fn.name]
            elif type(fn) is not TFun:
                fn = eval_term(fn, env, ctx)
            arg = eval_term(t.arg, env, ctx)
            call_env = ctx.program.base_env()
            bind_pattern(fn.pat, arg, call_env)
            t = fn.body
            env = call_env
            continue
        if tt is TInfer:
            engine_state = eval_term(t.state, env, ctx)
            if ctx is None:
                raise EvalError("infer needs an inference context")
            return ctx.step_infer(t, engine_state, env)
        if tt is TFun:
            return t
        if tt is TGlobal:
            return ctx.program.defs[t.name]
        if tt in (TSample, TObserve, TFactor):
            raise KindError(
                "probabilistic construct reached the deterministic evaluator; "
                "this indicates a kind-checking bug"
            )
        raise EvalError(f"unknown term {type(t).__name__}")


class ProgramCtx:
    """Minimal evaluation context: resolves step functions, rejects infer."""

    __slots__ = ("program",)

    def __init__(self, program):
        self.program = program

    def step_infer(self, t, engine_state, env):
        raise EvalError("infer needs an inference engine context")


def eval_det(term, state, env=None, ctx=None, program=None):
    """Apply a compiled `fun state -> (value, state)` to a state tree."""
    if type(term) is not TFun:
        raise EvalError("eval_det expects a compiled transition function")
    if ctx is None and program is not None:
        ctx = ProgramCtx(program)
    e = dict(env) if env else (ctx.program.base_env() if ctx else {})
    bind_pattern(term.pat, state, e)
    return eval_term(term.body, e, ctx)


def eval_const(decl, program):
    """Evaluate a constant declaration's body once."""
    from .compilefn import compile_expr

    fun = compile_expr(decl.body, program.kernel)
    from .alloc import allocate

    state0 = allocate(decl.body, program.kernel)
    value, _ = eval_det(fun, state0, env=program.base_env(), ctx=ProgramCtx(program))
    return value


def step_node(program, name, state, inp, ctx=None, env=None):
    """One synchronous step of a compiled declaration.

    Returns (output value, next state).
    """
    fun = program.defs[name]
    if ctx is None:
        ctx = ProgramCtx(program)
    e = dict(env) if env is not None else program.base_env()
    bind_pattern(fun.pat, (state, inp), e)
    return eval_term(fun.body, e, ctx)
