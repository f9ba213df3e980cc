"""Surface-sugar elimination.

`pre` and `->` are compiled away exactly like the classic first-step rewrite:
each block that needs it gains a boolean stream that is true only on its first
step (`init first = true` / `first = false`), arrows become value-level
conditionals on `last first`, and unit delays become `last` reads of
initialized equations.  General `init x = e` (a non-constant first value, used
by models that sample an initial parameter) becomes a lazily-guarded
`present (last first) -> e else last x` equation so the defining expression
runs only once.
"""

from __future__ import annotations

from ..errors import ParseError
from .ast import (
    NIL,
    Call,
    Const,
    Decl,
    Expr,
    Factor,
    Infer,
    Last,
    Observe,
    OpApp,
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


class _Block:
    """Mutable desugaring state for the nearest enclosing equation block."""

    def __init__(self, names, fresh):
        self.names = set(names)  # equation/init names defined by the block
        self.init_names = set()
        self.extra_inits = []
        self.extra_eqs = []
        self.first_name = None
        self._fresh = fresh

    def first(self):
        if self.first_name is None:
            self.first_name = self._fresh("first")
            self.extra_inits.append((self.first_name, Const(value=True)))
            self.extra_eqs.append((self.first_name, Const(value=False)))
        return self.first_name

    def ensure_init(self, name):
        if name not in self.init_names:
            self.init_names.add(name)
            self.extra_inits.append((name, Const(value=NIL)))

    def add_delay(self, expr):
        name = self._fresh("pre")
        self.names.add(name)
        self.init_names.add(name)
        self.extra_inits.append((name, Const(value=NIL)))
        self.extra_eqs.append((name, expr))
        return name


class _Desugarer:
    def __init__(self):
        self._count = 0

    def fresh(self, base):
        self._count += 1
        return f"_{base}{self._count}"

    def program(self, prog: Program) -> Program:
        return Program([self.decl(d) for d in prog.decls])

    def decl(self, d: Decl) -> Decl:
        return Decl(d.name, d.param, self.body(d.body), d.is_proba, line=d.line)

    def body(self, e: Expr) -> Expr:
        """Desugar a block-bearing position, wrapping if sugar needs a block."""
        if isinstance(e, WhereRec):
            return self.block(e)
        blk = _Block((), self.fresh)
        out = self.expr(e, blk)
        if blk.extra_inits or blk.extra_eqs:
            return WhereRec(result=out, inits=blk.extra_inits, eqs=blk.extra_eqs)
        return out

    def block(self, w: WhereRec) -> WhereRec:
        blk = _Block([n for n, _ in w.inits] + [n for n, _ in w.eqs], self.fresh)
        blk.init_names.update(n for n, _ in w.inits)
        eq_names = {n for n, _ in w.eqs}

        inits = []
        rewritten_eqs = []
        for name, e in w.inits:
            if isinstance(e, Const):
                inits.append((name, e))
                continue
            # Non-constant first value: run it once, then hold.
            if name in eq_names:
                raise ParseError(
                    f"{name!r} has both a computed init and a defining equation",
                    e.line, e.col,
                )
            inits.append((name, Const(value=NIL)))
            guard = Last(name=blk.first())
            body = self.expr(e, blk)
            rewritten_eqs.append((name, Present(cond=guard, then=body, els=Last(name=name))))

        eqs = [(name, self.expr(e, blk)) for name, e in w.eqs]
        eqs.extend(rewritten_eqs)

        result = self.expr(w.result, blk)

        all_inits = blk.extra_inits + inits
        all_eqs = blk.extra_eqs + eqs
        defined = {n for n, _ in all_eqs}
        for name, _ in all_inits:
            if name not in defined:
                all_eqs.append((name, Last(name=name)))
        return WhereRec(result=result, inits=all_inits, eqs=all_eqs)

    def expr(self, e: Expr, blk: _Block) -> Expr:
        if isinstance(e, (Const, Var, Last)):
            return e
        if isinstance(e, SugarArrow):
            first = Last(name=blk.first())
            then = self.expr(e.first, blk)
            els = self.expr(e.rest, blk)
            return OpApp(op="ifte", arg=Pair(fst=first, snd=Pair(fst=then, snd=els))).at(
                e.line, e.col
            )
        if isinstance(e, SugarPre):
            arg = e.arg
            if isinstance(arg, Var) and arg.name in blk.names:
                blk.ensure_init(arg.name)
                return Last(name=arg.name).at(e.line, e.col)
            name = blk.add_delay(self.expr(arg, blk))
            return Last(name=name).at(e.line, e.col)
        if isinstance(e, Pair):
            return Pair(fst=self.expr(e.fst, blk), snd=self.expr(e.snd, blk)).at(e.line, e.col)
        if isinstance(e, OpApp):
            return OpApp(op=e.op, arg=self.expr(e.arg, blk)).at(e.line, e.col)
        if isinstance(e, Call):
            return Call(fn=e.fn, arg=self.expr(e.arg, blk)).at(e.line, e.col)
        if isinstance(e, Sample):
            return Sample(arg=self.expr(e.arg, blk)).at(e.line, e.col)
        if isinstance(e, Observe):
            return Observe(dist=self.expr(e.dist, blk), value=self.expr(e.value, blk)).at(
                e.line, e.col
            )
        if isinstance(e, Factor):
            return Factor(arg=self.expr(e.arg, blk)).at(e.line, e.col)
        if isinstance(e, Infer):
            return Infer(particles=e.particles, model=self.expr(e.model, blk)).at(e.line, e.col)
        if isinstance(e, WhereRec):
            return self.block(e)
        if isinstance(e, Present):
            # Branch state advances only on activation, so branch-local sugar
            # gets its own block; the condition runs every step.
            cond = self.expr(e.cond, blk)
            return Present(cond=cond, then=self.body(e.then), els=self.body(e.els)).at(
                e.line, e.col
            )
        if isinstance(e, Reset):
            # Sugar state inside the body must be re-initialized by the reset.
            every = self.expr(e.every, blk)
            return Reset(body=self.body(e.body), every=every).at(e.line, e.col)
        raise TypeError(f"cannot desugar {type(e).__name__}")


def desugar(prog: Program) -> Program:
    """Rewrite `pre`/`->`/computed inits into kernel form."""
    return _Desugarer().program(prog)
