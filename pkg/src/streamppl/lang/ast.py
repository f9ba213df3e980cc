"""Abstract syntax of the kernel reactive language.

Surface sugar (`pre`, `->`, general `init x = e`) survives parsing as
dedicated nodes and is removed by the desugarer; everything downstream of it
only sees kernel forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


class _Nil:
    """Arbitrary initialization value; reading it as data is an error.

    Unit-delay desugaring introduces state slots whose first-step value is
    never observable in a well-initialized program.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "nil"


NIL = _Nil()


@dataclass
class Expr:
    line: Optional[int] = field(default=None, repr=False, compare=False)
    col: Optional[int] = field(default=None, repr=False, compare=False)
    kind: Optional[str] = field(default=None, repr=False, compare=False)
    ty: object = field(default=None, repr=False, compare=False)

    def at(self, line, col):
        self.line = line
        self.col = col
        return self


@dataclass
class Const(Expr):
    value: object = None


@dataclass
class Var(Expr):
    name: str = ""


@dataclass
class Pair(Expr):
    fst: Expr = None
    snd: Expr = None


@dataclass
class OpApp(Expr):
    op: str = ""
    arg: Expr = None


@dataclass
class Call(Expr):
    fn: str = ""
    arg: Expr = None


@dataclass
class Last(Expr):
    name: str = ""


@dataclass
class WhereRec(Expr):
    result: Expr = None
    inits: list = field(default_factory=list)  # [(name, Expr)]
    eqs: list = field(default_factory=list)  # [(name, Expr)]


@dataclass
class Present(Expr):
    cond: Expr = None
    then: Expr = None
    els: Expr = None


@dataclass
class Reset(Expr):
    body: Expr = None
    every: Expr = None


@dataclass
class Sample(Expr):
    arg: Expr = None


@dataclass
class Observe(Expr):
    dist: Expr = None
    value: Expr = None


@dataclass
class Factor(Expr):
    arg: Expr = None


@dataclass
class Infer(Expr):
    particles: int = 0
    model: Expr = None  # a Call to a proba declaration


@dataclass
class SugarPre(Expr):
    arg: Expr = None


@dataclass
class SugarArrow(Expr):
    first: Expr = None
    rest: Expr = None


@dataclass
class Decl:
    name: str
    param: object  # Pattern
    body: Expr
    is_proba: bool
    line: Optional[int] = None

    @property
    def is_const(self):
        return self.param is None


# Parameter patterns


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PTuple:
    items: tuple


@dataclass(frozen=True)
class PUnit:
    pass


@dataclass
class Program:
    decls: list

    def decl(self, name: str) -> Decl:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)

    @property
    def last_decl(self) -> Decl:
        return self.decls[-1]


def children(e: Expr):
    """Immediate sub-expressions, in evaluation order."""
    if isinstance(e, (Const, Var, Last)):
        return ()
    if isinstance(e, Pair):
        return (e.fst, e.snd)
    if isinstance(e, OpApp):
        return (e.arg,)
    if isinstance(e, Call):
        return (e.arg,)
    if isinstance(e, WhereRec):
        return tuple(x for _, x in e.inits) + tuple(x for _, x in e.eqs) + (e.result,)
    if isinstance(e, Present):
        return (e.cond, e.then, e.els)
    if isinstance(e, Reset):
        return (e.body, e.every)
    if isinstance(e, Sample):
        return (e.arg,)
    if isinstance(e, Observe):
        return (e.dist, e.value)
    if isinstance(e, Factor):
        return (e.arg,)
    if isinstance(e, Infer):
        return (e.model,)
    if isinstance(e, SugarPre):
        return (e.arg,)
    if isinstance(e, SugarArrow):
        return (e.first, e.rest)
    raise TypeError(f"unknown expression {type(e).__name__}")
