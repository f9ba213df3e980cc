"""Direct co-iterative interpreter for deterministic programs.

A stream is an initial state plus a transition function; this module
interprets kernel expressions that way, without compiling them.  It also
gives `pre`/`->` their direct stream meaning, so both sugared and kernel
forms can be run.  It serves as the independent oracle for differential
tests against the compiled evaluator: on the same (desugared) program both
must produce identical output streams and identical state trees.
"""

from __future__ import annotations

from ..errors import EvalError, KindError
from ..lang.ast import (
    NIL,
    Call,
    Const,
    Factor,
    Infer,
    Last,
    Observe,
    OpApp,
    PTuple,
    PUnit,
    PVar,
    Pair,
    Present,
    Program,
    Reset,
    Sample,
    SugarArrow,
    SugarPre,
    Var,
    WhereRec,
)
from ..lang.ops import OPS


class Coiter:
    def __init__(self, program: Program, globals_env=None):
        self.program = program
        self.globals_env = dict(globals_env or {})
        self._consts_done = False

    def _ensure_consts(self):
        if self._consts_done:
            return
        for d in self.program.decls:
            if d.is_const:
                state = self.init(d.body)
                value, _ = self.step(d.body, dict(self.globals_env), state)
                self.globals_env[d.name] = value
        self._consts_done = True

    # initial states

    def init(self, e):
        if isinstance(e, (Const, Var, Last)):
            return ()
        if isinstance(e, Pair):
            return (self.init(e.fst), self.init(e.snd))
        if isinstance(e, OpApp):
            return self.init(e.arg)
        if isinstance(e, Call):
            decl = self.program.decl(e.fn)
            return (self.init(decl.body), self.init(e.arg))
        if isinstance(e, WhereRec):
            return (
                tuple(c.value for _, c in e.inits),
                tuple(self.init(x) for _, x in e.eqs),
                self.init(e.result),
            )
        if isinstance(e, Present):
            return (self.init(e.cond), self.init(e.then), self.init(e.els))
        if isinstance(e, Reset):
            return (self.init(e.body), self.init(e.body), self.init(e.every))
        if isinstance(e, SugarPre):
            return (NIL, self.init(e.arg))
        if isinstance(e, SugarArrow):
            return (True, self.init(e.first), self.init(e.rest))
        if isinstance(e, (Sample, Observe, Factor, Infer)):
            raise KindError("the co-iterative oracle only runs deterministic programs")
        raise EvalError(f"cannot initialize {type(e).__name__}")

    # transitions

    def step(self, e, env, s):
        if isinstance(e, Const):
            return e.value, s
        if isinstance(e, Var):
            return env[e.name], s
        if isinstance(e, Last):
            return env[e.name + "$last"], s
        if isinstance(e, Pair):
            v1, s1 = self.step(e.fst, env, s[0])
            v2, s2 = self.step(e.snd, env, s[1])
            return (v1, v2), (s1, s2)
        if isinstance(e, OpApp):
            v, s1 = self.step(e.arg, env, s)
            info = OPS[e.op]
            if info.kind == "P":
                raise KindError("probabilistic operator in the deterministic oracle")
            if info.arity == 1:
                return info.fn(v), s1
            if info.arity == 2:
                return info.fn(v[0], v[1]), s1
            return info.fn(v[0], v[1][0], v[1][1]), s1
        if isinstance(e, Call):
            decl = self.program.decl(e.fn)
            v1, sarg = self.step(e.arg, env, s[1])
            callee_env = dict(self.globals_env)
            _bind_param(decl.param, v1, callee_env)
            v2, scallee = self.step(decl.body, callee_env, s[0])
            return v2, (scallee, sarg)
        if isinstance(e, WhereRec):
            mem, eq_states, sres = s
            env = dict(env)
            for (name, _), m in zip(e.inits, mem):
                env[name + "$last"] = m
            new_eq_states = []
            for (name, eq), se in zip(e.eqs, eq_states):
                v, se2 = self.step(eq, env, se)
                env[name] = v
                new_eq_states.append(se2)
            v, sres2 = self.step(e.result, env, sres)
            new_mem = tuple(env[name] for name, _ in e.inits)
            return v, (new_mem, tuple(new_eq_states), sres2)
        if isinstance(e, Present):
            vc, sc = self.step(e.cond, env, s[0])
            if vc:
                v1, s1 = self.step(e.then, env, s[1])
                return v1, (sc, s1, s[2])
            v2, s2 = self.step(e.els, env, s[2])
            return v2, (sc, s[1], s2)
        if isinstance(e, Reset):
            s0, s1, s2 = s
            vc, s2b = self.step(e.every, env, s2)
            vb, s1b = self.step(e.body, env, s0 if vc else s1)
            return vb, (s0, s1b, s2b)
        if isinstance(e, SugarPre):
            buf, sa = s
            v, sa2 = self.step(e.arg, env, sa)
            return buf, (v, sa2)
        if isinstance(e, SugarArrow):
            flag, s1, s2 = s
            v1, s1b = self.step(e.first, env, s1)
            v2, s2b = self.step(e.rest, env, s2)
            return (v1 if flag else v2), (False, s1b, s2b)
        raise KindError(f"{type(e).__name__} is not deterministic")


def _bind_param(param, value, env):
    if param is None or isinstance(param, PUnit):
        return
    if isinstance(param, PVar):
        env[param.name] = value
        return
    if isinstance(param, PTuple):
        items = param.items
        v = value
        for p in items[:-1]:
            _bind_param(p, v[0], env)
            v = v[1]
        _bind_param(items[-1], v, env)
        return
    raise EvalError(f"bad parameter pattern {param}")


def run_coiter(program: Program, name: str, inputs, globals_env=None):
    """Run a declaration over an input stream; returns (outputs, final state)."""
    interp = Coiter(program, globals_env)
    interp._ensure_consts()
    decl = program.decl(name)
    state = interp.init(decl.body)
    outputs = []
    for inp in inputs:
        env = dict(interp.globals_env)
        _bind_param(decl.param, inp, env)
        v, state = interp.step(decl.body, env, state)
        outputs.append(v)
    return outputs, state


def interp_coiter(program: Program, name: str, inputs, globals_env=None):
    """Output stream of a deterministic declaration under the reference semantics."""
    outputs, _ = run_coiter(program, name, inputs, globals_env)
    return outputs
