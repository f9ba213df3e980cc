"""Compilation of kernel expressions into transition functions.

Each expression becomes a function from its state tree to a (value, state)
pair.  Effects (samples, observations, node calls, inference) are sequenced
through `let`; pure operator applications may nest.  Administrative
applications are reduced during generation, so the emitted term is already in
a flat let-normal form.  Local names are alpha-renamed, which keeps one flat
runtime environment per step correct even when nested blocks reuse names.
"""

from __future__ import annotations

from ..errors import ShapeError
from ..lang.ast import (
    Call,
    Const,
    Decl,
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
    Var,
    WhereRec,
)
from .alloc import allocate
from .terms import (
    PP,
    PT,
    PV,
    WILD,
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
    lets,
)

UNIT = TConst(())


class _CE:
    """A compiled expression: state pattern, effect bindings, value, next state."""

    __slots__ = ("pat", "bindings", "value", "out")

    def __init__(self, pat, bindings, value, out):
        self.pat = pat
        self.bindings = bindings
        self.value = value
        self.out = out


class _Compiler:
    def __init__(self, program):
        self.program = program
        self._count = 0
        self.scopes = []  # [(values: dict, lasts: dict)]

    def fresh(self, base="t"):
        self._count += 1
        return f"{base}${self._count}"

    def lookup_value(self, name):
        for values, _ in reversed(self.scopes):
            if name in values:
                return values[name]
        return name  # ambient global or parameter of an enclosing declaration

    def lookup_last(self, name):
        for _, lasts in reversed(self.scopes):
            if name in lasts:
                return lasts[name]
        raise ShapeError(f"last {name!r} has no initialized state slot")

    # expression compilation

    def compile(self, e) -> _CE:
        if isinstance(e, Const):
            return _CE(WILD, [], TConst(e.value), UNIT)
        if isinstance(e, Var):
            return _CE(WILD, [], TVarT(self.lookup_value(e.name)), UNIT)
        if isinstance(e, Last):
            return _CE(WILD, [], TVarT(self.lookup_last(e.name)), UNIT)
        if isinstance(e, Pair):
            c1 = self.compile(e.fst)
            c2 = self.compile(e.snd)
            return _CE(
                PP(c1.pat, c2.pat),
                c1.bindings + c2.bindings,
                TPairT(c1.value, c2.value),
                TPairT(c1.out, c2.out),
            )
        if isinstance(e, OpApp):
            c = self.compile(e.arg)
            return _CE(c.pat, c.bindings, TOp(e.op, c.value), c.out)
        if isinstance(e, Call):
            c = self.compile(e.arg)
            sf = self.fresh("s")
            v2 = self.fresh("v")
            sf2 = self.fresh("s")
            call = TApp(TGlobal(e.fn), TPairT(TVarT(sf), c.value))
            return _CE(
                PP(PV(sf), c.pat),
                c.bindings + [(PP(PV(v2), PV(sf2)), call)],
                TVarT(v2),
                TPairT(TVarT(sf2), c.out),
            )
        if isinstance(e, Sample):
            c = self.compile(e.arg)
            v = self.fresh("v")
            return _CE(c.pat, c.bindings + [(PV(v), TSample(c.value))], TVarT(v), c.out)
        if isinstance(e, Observe):
            c1 = self.compile(e.dist)
            c2 = self.compile(e.value)
            return _CE(
                PP(c1.pat, c2.pat),
                c1.bindings + c2.bindings + [(WILD, TObserve(c1.value, c2.value))],
                UNIT,
                TPairT(c1.out, c2.out),
            )
        if isinstance(e, Factor):
            c = self.compile(e.arg)
            return _CE(c.pat, c.bindings + [(WILD, TFactor(c.value))], UNIT, c.out)
        if isinstance(e, WhereRec):
            return self._compile_block(e)
        if isinstance(e, Present):
            return self._compile_present(e)
        if isinstance(e, Reset):
            return self._compile_reset(e)
        if isinstance(e, Infer):
            cm = self.compile(e.model)
            model_fun = TFun(cm.pat, lets(cm.bindings, TPairT(cm.value, cm.out)))
            sig = self.fresh("sig")
            vd = self.fresh("v")
            sig2 = self.fresh("sig")
            binding = (PP(PV(vd), PV(sig2)), TInfer(e.particles, model_fun, TVarT(sig)))
            return _CE(PV(sig), [binding], TVarT(vd), TVarT(sig2))
        raise ShapeError(f"cannot compile {type(e).__name__}")

    def _compile_block(self, e: WhereRec) -> _CE:
        values = {}
        lasts = {}
        init_names = [n for n, _ in e.inits]
        eq_names = [n for n, _ in e.eqs]
        for n in set(init_names) | set(eq_names):
            values[n] = self.fresh(n.strip("_$") or "x")
        for n in init_names:
            lasts[n] = self.fresh((n.strip("_$") or "x") + "_last")
        self.scopes.append((values, lasts))
        try:
            lasts_pat = PT([PV(lasts[n]) for n in init_names])
            bindings = []
            eq_pats = []
            eq_outs = []
            for n, eq in e.eqs:
                c = self.compile(eq)
                eq_pats.append(c.pat)
                eq_outs.append(c.out)
                bindings.extend(c.bindings)
                bindings.append((PV(values[n]), c.value))
            cres = self.compile(e.result)
            bindings.extend(cres.bindings)
            out = TTup(
                [
                    TTup([TVarT(values[n]) for n in init_names]),
                    TTup(eq_outs),
                    cres.out,
                ]
            )
            return _CE(
                PT([lasts_pat, PT(eq_pats), cres.pat]),
                bindings,
                cres.value,
                out,
            )
        finally:
            self.scopes.pop()

    def _compile_present(self, e: Present) -> _CE:
        cc = self.compile(e.cond)
        ct = self.compile(e.then)
        ce = self.compile(e.els)
        s1 = self.fresh("s")
        s2 = self.fresh("s")
        vr = self.fresh("v")
        so = self.fresh("s")
        then_term = TLet(
            ct.pat,
            TVarT(s1),
            lets(ct.bindings, TPairT(ct.value, TTup([cc.out, ct.out, TVarT(s2)]))),
        )
        else_term = TLet(
            ce.pat,
            TVarT(s2),
            lets(ce.bindings, TPairT(ce.value, TTup([cc.out, TVarT(s1), ce.out]))),
        )
        bindings = cc.bindings + [(PP(PV(vr), PV(so)), TIf(cc.value, then_term, else_term))]
        return _CE(PT([cc.pat, PV(s1), PV(s2)]), bindings, TVarT(vr), TVarT(so))

    def _compile_reset(self, e: Reset) -> _CE:
        ce = self.compile(e.every)
        cb = self.compile(e.body)
        s0 = self.fresh("s")
        s1 = self.fresh("s")
        sel = self.fresh("s")
        bindings = list(ce.bindings)
        bindings.append(
            (PV(sel), TIf(ce.value, TOp("__copy_state", TVarT(s0)), TVarT(s1)))
        )
        bindings.append((cb.pat, TVarT(sel)))
        bindings.extend(cb.bindings)
        return _CE(
            PT([PV(s0), PV(s1), ce.pat]),
            bindings,
            cb.value,
            TTup([TVarT(s0), cb.out, ce.out]),
        )

    # declarations

    def compile_decl(self, d: Decl) -> TFun:
        values = {}
        param_pat = self._param_pattern(d.param, values)
        self.scopes.append((values, {}))
        try:
            c = self.compile(d.body)
        finally:
            self.scopes.pop()
        return TFun(PP(c.pat, param_pat), lets(c.bindings, TPairT(c.value, c.out)))

    def _param_pattern(self, param, values):
        if param is None or isinstance(param, PUnit):
            return WILD
        if isinstance(param, PVar):
            name = self.fresh(param.name)
            values[param.name] = name
            return PV(name)
        if isinstance(param, PTuple):
            pats = [self._param_pattern(p, values) for p in param.items]
            pat = pats[-1]
            for p in reversed(pats[:-1]):
                pat = PP(p, pat)
            return pat
        raise ShapeError(f"bad parameter pattern {param}")


class CompiledProgram:
    """Compiled declarations plus the ambient constant environment."""

    def __init__(self, kernel, defs, kinds, globals_env):
        self.kernel = kernel  # scheduled kernel program, used by allocate
        self.defs = defs  # name -> TFun taking (state, input)
        self.kinds = kinds  # name -> "D" | "P"
        self.globals_env = globals_env

    def decl(self, name):
        return self.kernel.decl(name)

    def init_state(self, name):
        return allocate(self.kernel.decl(name).body, self.kernel)

    def base_env(self):
        return dict(self.globals_env)


def compile_expr(expr, program=None) -> TFun:
    """Compile one kernel expression into `fun state -> (value, state)`."""
    c = _Compiler(program).compile(expr)
    return TFun(c.pat, lets(c.bindings, TPairT(c.value, c.out)))


def compile_decl(d: Decl, program=None) -> TFun:
    return _Compiler(program).compile_decl(d)


def compile_program(prog: Program, globals_env=None) -> CompiledProgram:
    """Compile every declaration; constant declarations are evaluated once."""
    genv = dict(globals_env or {})
    defs = {}
    kinds = {}
    compiled = CompiledProgram(prog, defs, kinds, genv)
    for d in prog.decls:
        if d.is_const:
            from .evaldet import eval_const

            genv[d.name] = eval_const(d, compiled)
            continue
        defs[d.name] = compile_decl(d, prog)
        kinds[d.name] = "P" if d.is_proba else "D"
    return compiled
