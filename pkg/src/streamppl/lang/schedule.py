"""Static scheduling of equation blocks.

Equations are topologically sorted by their direct-read dependencies: an
equation that reads `x` outside of `last` must run after the equation defining
`x`.  Reads under `last` use the previous step's value and impose no ordering.
Ties break by source order so a program always schedules the same way.
Instantaneous cycles (a dependency cycle with no `last` on it) are rejected.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from ..errors import ScheduleCycleError
from .ast import Call, Decl, Expr, Infer, Last, Pair, Program, Var, WhereRec, children


def direct_reads(e: Expr, names: set) -> set:
    """Names from `names` read by `e` outside of any `last`."""
    out = set()
    _direct_reads(e, names, out)
    return out


def _direct_reads(e: Expr, names: set, out: set):
    if isinstance(e, Var):
        if e.name in names:
            out.add(e.name)
        return
    if isinstance(e, Last):
        return
    if isinstance(e, WhereRec):
        shadowed = {n for n, _ in e.inits} | {n for n, _ in e.eqs}
        inner = names - shadowed
        for _, ie in e.inits:
            _direct_reads(ie, inner, out)
        for _, ee in e.eqs:
            _direct_reads(ee, inner, out)
        _direct_reads(e.result, inner, out)
        return
    for c in children(e):
        _direct_reads(c, names, out)


@dataclass
class ScheduledBlock:
    inits: list  # ordered (name, const expr)
    eqs: list  # ordered (name, expr), a valid schedule
    result: Expr


def schedule(block: WhereRec) -> ScheduledBlock:
    """Order a block's equations; raises ScheduleCycleError on an instantaneous cycle."""
    names = [n for n, _ in block.eqs]
    name_set = set(names)
    deps = {}
    for n, e in block.eqs:
        # a direct self-read is an instantaneous cycle, so keep it in the graph
        deps[n] = direct_reads(e, name_set)
    index = {n: i for i, n in enumerate(names)}
    dependents = {n: [] for n in names}
    in_deg = {n: 0 for n in names}
    for n in names:
        for d in deps[n]:
            dependents[d].append(n)
            in_deg[n] += 1
    ready = [index[n] for n in names if in_deg[n] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        n = names[i]
        order.append(n)
        for m in dependents[n]:
            in_deg[m] -= 1
            if in_deg[m] == 0:
                heapq.heappush(ready, index[m])
    if len(order) != len(names):
        cycle = sorted(n for n in names if in_deg[n] > 0)
        raise ScheduleCycleError(
            f"instantaneous cycle between equations: {', '.join(cycle)}"
        )
    eq_map = dict(block.eqs)
    return ScheduledBlock(
        inits=list(block.inits),
        eqs=[(n, eq_map[n]) for n in order],
        result=block.result,
    )


def _schedule_expr(e: Expr) -> Expr:
    if isinstance(e, WhereRec):
        sb = schedule(e)
        w = WhereRec(
            result=_schedule_expr(sb.result),
            inits=sb.inits,
            eqs=[(n, _schedule_expr(x)) for n, x in sb.eqs],
        )
        w.line, w.col, w.kind, w.ty = e.line, e.col, e.kind, e.ty
        return w
    for field_name in _REBUILDERS.get(type(e), ()):
        val = getattr(e, field_name)
        if isinstance(val, Expr):
            setattr(e, field_name, _schedule_expr(val))
    return e


_REBUILDERS = {}


def _init_rebuilders():
    from . import ast

    _REBUILDERS.update(
        {
            ast.Pair: ("fst", "snd"),
            ast.OpApp: ("arg",),
            ast.Call: ("arg",),
            ast.Present: ("cond", "then", "els"),
            ast.Reset: ("body", "every"),
            ast.Sample: ("arg",),
            ast.Observe: ("dist", "value"),
            ast.Factor: ("arg",),
            ast.Infer: ("model",),
        }
    )


_init_rebuilders()


def schedule_program(prog: Program) -> Program:
    """Reorder every block of every declaration into a valid schedule."""
    for d in prog.decls:
        d.body = _schedule_expr(d.body)
    return prog
