"""State allocation: the initial state tree of a compiled expression.

The state of an expression mirrors its structure: constants and variable
reads need no state (unit), a block's state is (init values, equation states,
result state), a call embeds the callee's initial state, and `reset` carries a
pristine copy of its body's initial state to restart from.
"""

from __future__ import annotations

from ..errors import ShapeError
from ..lang.ast import (
    NIL,
    Call,
    Const,
    Factor,
    Infer,
    Last,
    Observe,
    OpApp,
    Pair,
    Present,
    Reset,
    Sample,
    Var,
    WhereRec,
)


class EngineState:
    """State leaf of an `infer` site: a cloud of particles.

    The particle list is materialized by the inference engine on first use,
    because which engine runs is a property of the run, not the program.
    """

    __slots__ = ("particles_requested", "model_state0", "cloud", "engine")

    def __init__(self, particles_requested, model_state0):
        self.particles_requested = particles_requested
        self.model_state0 = model_state0
        self.cloud = None
        self.engine = None

    def fresh_like(self):
        return EngineState(self.particles_requested, self.model_state0)


def allocate(expr, program):
    """Initial state tree for `expr` (`program` resolves callee states)."""
    if isinstance(expr, (Const, Var, Last)):
        return ()
    if isinstance(expr, Pair):
        return (allocate(expr.fst, program), allocate(expr.snd, program))
    if isinstance(expr, OpApp):
        return allocate(expr.arg, program)
    if isinstance(expr, Call):
        decl = program.decl(expr.fn)
        return (allocate(decl.body, program), allocate(expr.arg, program))
    if isinstance(expr, WhereRec):
        init_vals = tuple(e.value for _, e in expr.inits)
        eq_states = tuple(allocate(e, program) for _, e in expr.eqs)
        return (init_vals, eq_states, allocate(expr.result, program))
    if isinstance(expr, Present):
        return (
            allocate(expr.cond, program),
            allocate(expr.then, program),
            allocate(expr.els, program),
        )
    if isinstance(expr, Reset):
        return (
            allocate(expr.body, program),
            allocate(expr.body, program),
            allocate(expr.every, program),
        )
    if isinstance(expr, Sample):
        return allocate(expr.arg, program)
    if isinstance(expr, Observe):
        return (allocate(expr.dist, program), allocate(expr.value, program))
    if isinstance(expr, Factor):
        return allocate(expr.arg, program)
    if isinstance(expr, Infer):
        return EngineState(expr.particles, allocate(expr.model, program))
    raise ShapeError(f"cannot allocate state for {type(expr).__name__}")


def state_shape(state) -> str:
    """Structural skeleton of a state tree, for shape-stability checks."""
    if isinstance(state, tuple):
        return "(" + ",".join(state_shape(s) for s in state) + ")"
    if isinstance(state, EngineState):
        return "<engine>"
    if state is NIL:
        return "."
    return "."


def copy_state(state):
    """Copy a state tree, duplicating mutable leaves.

    Immutable leaves (numbers, arrays that are never written in place,
    symbolic references) are shared; engine clouds are duplicated.
    """
    if isinstance(state, tuple):
        return tuple(copy_state(s) for s in state)
    if isinstance(state, EngineState):
        fresh = state.fresh_like()
        if state.cloud is not None:
            fresh.engine = state.engine
            fresh.cloud = state.engine.copy_cloud(state.cloud)
        return fresh
    return state
