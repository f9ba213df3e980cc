"""Terms of the transition-function IR.

The target language is first order: no recursion, no loops.  Compiled
expressions are functions from a state tree to a (value, state) pair, with
effects (sample/observe/factor/infer, node calls) sequenced through `let`.
`infer` always applies a literal transition function to a distribution of
states.
"""

from __future__ import annotations


class Pat:
    __slots__ = ()


class PV(Pat):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


class PP(Pat):
    """Binary pair pattern."""

    __slots__ = ("fst", "snd")

    def __init__(self, fst, snd):
        self.fst = fst
        self.snd = snd

    def __repr__(self):
        return f"({self.fst!r}, {self.snd!r})"


class PT(Pat):
    """Flat tuple pattern (state tuples of blocks)."""

    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)

    def __repr__(self):
        return "(" + ", ".join(map(repr, self.items)) + ")"


class PW(Pat):
    __slots__ = ()

    def __repr__(self):
        return "_"


WILD = PW()


class Term:
    __slots__ = ()


class TConst(Term):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class TVarT(Term):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class TGlobal(Term):
    """Reference to a compiled declaration's step function."""

    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class TPairT(Term):
    __slots__ = ("fst", "snd")

    def __init__(self, fst, snd):
        self.fst = fst
        self.snd = snd


class TTup(Term):
    __slots__ = ("items",)

    def __init__(self, items):
        self.items = tuple(items)


class TOp(Term):
    __slots__ = ("op", "arg")

    def __init__(self, op, arg):
        self.op = op
        self.arg = arg


class TApp(Term):
    __slots__ = ("fn", "arg")

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg


class TFun(Term):
    __slots__ = ("pat", "body")

    def __init__(self, pat, body):
        self.pat = pat
        self.body = body


class TLet(Term):
    __slots__ = ("pat", "bound", "body")

    def __init__(self, pat, bound, body):
        self.pat = pat
        self.bound = bound
        self.body = body


class TIf(Term):
    """Value-level conditional; only the taken branch is evaluated."""

    __slots__ = ("cond", "then", "els")

    def __init__(self, cond, then, els):
        self.cond = cond
        self.then = then
        self.els = els


class TSample(Term):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class TObserve(Term):
    __slots__ = ("dist", "value")

    def __init__(self, dist, value):
        self.dist = dist
        self.value = value


class TFactor(Term):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class TInfer(Term):
    __slots__ = ("particles", "model", "state")

    def __init__(self, particles, model, state):
        self.particles = particles
        self.model = model  # a TFun: the model's transition function
        self.state = state  # term evaluating to the engine-state leaf


def lets(bindings, body):
    """Right-fold let bindings around a body term."""
    out = body
    for pat, bound in reversed(bindings):
        out = TLet(pat, bound, out)
    return out


def pretty(t, indent=0) -> str:
    """Stable textual form of a term, for golden tests and debugging."""
    pad = "  " * indent

    def atom(x):
        return pretty(x, indent)

    if isinstance(t, TConst):
        v = t.value
        if v == ():
            return "()"
        return repr(v)
    if isinstance(t, TVarT):
        return t.name
    if isinstance(t, TGlobal):
        return f"@{t.name}"
    if isinstance(t, TPairT):
        return f"({atom(t.fst)}, {atom(t.snd)})"
    if isinstance(t, TTup):
        return "(" + ", ".join(atom(x) for x in t.items) + ")"
    if isinstance(t, TOp):
        return f"{t.op}({atom(t.arg)})"
    if isinstance(t, TApp):
        return f"{atom(t.fn)}({atom(t.arg)})"
    if isinstance(t, TFun):
        return f"fun {t.pat!r} ->\n{pad}  {pretty(t.body, indent + 1)}"
    if isinstance(t, TLet):
        return (
            f"let {t.pat!r} = {pretty(t.bound, indent)} in\n"
            f"{pad}{pretty(t.body, indent)}"
        )
    if isinstance(t, TIf):
        return (
            f"if {atom(t.cond)}\n{pad}then {pretty(t.then, indent + 1)}\n"
            f"{pad}else {pretty(t.els, indent + 1)}"
        )
    if isinstance(t, TSample):
        return f"sample({atom(t.arg)})"
    if isinstance(t, TObserve):
        return f"observe({atom(t.dist)}, {atom(t.value)})"
    if isinstance(t, TFactor):
        return f"factor({atom(t.arg)})"
    if isinstance(t, TInfer):
        return (
            f"infer[{t.particles}]({pretty(t.model, indent + 1)},\n"
            f"{pad}  {atom(t.state)})"
        )
    raise TypeError(f"unknown term {type(t).__name__}")
