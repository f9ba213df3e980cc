"""Kernel-language frontend: parsing, desugaring, kind/type checking, scheduling."""

from .ast import (  # noqa: F401
    NIL,
    Call,
    Const,
    Decl,
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
from .parser import parse  # noqa: F401
from .desugar import desugar  # noqa: F401
from .check import kind_check, D, P  # noqa: F401
from .schedule import schedule, schedule_program, ScheduledBlock  # noqa: F401
