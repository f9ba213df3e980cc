"""Kind and type checking.

Every expression is classified as deterministic (D) or probabilistic (P):
`sample`/`observe`/`factor`/`eval` are P and only legal inside `proba` bodies;
`infer` closes over a probabilistic model and is itself D.  Deterministic
expressions lift freely into probabilistic contexts.  Types are inferred by
unification; distribution types carry a density flag (`t dist` with density,
its supertype `t dist*` without), and `observe` demands the density form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..errors import KindError, TypeMismatchError
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
from .ops import OPS

D = "D"
P = "P"


# Types


@dataclass(frozen=True)
class TBase:
    name: str

    def __str__(self):
        return self.name


TBOOL = TBase("bool")
TINT = TBase("int")
TFLOAT = TBase("float")
TUNIT = TBase("unit")


@dataclass(frozen=True)
class TPair:
    fst: object
    snd: object

    def __str__(self):
        return f"({self.fst} * {self.snd})"


@dataclass(frozen=True)
class TVec:
    dim: object = None

    def __str__(self):
        return "vec" if self.dim is None else f"vec[{self.dim}]"


@dataclass(frozen=True)
class TMat:
    rows: object = None
    cols: object = None

    def __str__(self):
        return "mat"


@dataclass(frozen=True)
class TDist:
    elem: object
    density: bool  # True: `t dist` (has a density); False: `t dist*`

    def __str__(self):
        star = "" if self.density else "*"
        return f"{self.elem} dist{star}"


class TVar:
    _ids = itertools.count()

    __slots__ = ("tid", "numeric")

    def __init__(self, numeric=False):
        self.tid = next(TVar._ids)
        self.numeric = numeric

    def __repr__(self):
        return f"'t{self.tid}"

    def __str__(self):
        return repr(self)


@dataclass(frozen=True)
class FnSig:
    param: object
    kind: str
    ret: object


def _type_of_value(v):
    if isinstance(v, bool):
        return TBOOL
    if isinstance(v, int):
        return TINT
    if isinstance(v, float):
        return TFLOAT
    if isinstance(v, tuple):
        if not v:
            return TUNIT
        t = _type_of_value(v[-1])
        for item in reversed(v[:-1]):
            t = TPair(_type_of_value(item), t)
        return t
    if isinstance(v, np.ndarray):
        if v.ndim == 1:
            return TVec(v.shape[0])
        if v.ndim == 2:
            return TMat(v.shape[0], v.shape[1])
    raise TypeMismatchError(f"cannot type ambient constant of {type(v).__name__}")


class Checker:
    def __init__(self, globals_env=None):
        self.subst = {}
        self.globals_env = dict(globals_env or {})
        self.sigs = {}

    # unification

    def resolve(self, t):
        while isinstance(t, TVar) and t.tid in self.subst:
            t = self.subst[t.tid]
        return t

    def deep_resolve(self, t):
        t = self.resolve(t)
        if isinstance(t, TPair):
            return TPair(self.deep_resolve(t.fst), self.deep_resolve(t.snd))
        if isinstance(t, TDist):
            return TDist(self.deep_resolve(t.elem), t.density)
        return t

    def _bind(self, tv, t, where):
        if isinstance(t, TVar) and t.tid == tv.tid:
            return
        if tv.numeric and not isinstance(t, TVar):
            if t not in (TINT, TFLOAT):
                raise TypeMismatchError(f"{where}: expected a numeric type, found {t}")
        if isinstance(t, TVar) and tv.numeric:
            t.numeric = True
        self.subst[tv.tid] = t

    def unify(self, a, b, where=""):
        a = self.resolve(a)
        b = self.resolve(b)
        if isinstance(a, TVar):
            self._bind(a, b, where)
            return
        if isinstance(b, TVar):
            self._bind(b, a, where)
            return
        if isinstance(a, TBase) and isinstance(b, TBase) and a == b:
            return
        if isinstance(a, TPair) and isinstance(b, TPair):
            self.unify(a.fst, b.fst, where)
            self.unify(a.snd, b.snd, where)
            return
        if isinstance(a, TVec) and isinstance(b, TVec):
            return
        if isinstance(a, TMat) and isinstance(b, TMat):
            return
        if isinstance(a, TDist) and isinstance(b, TDist):
            # `t dist` (with density) is accepted wherever `t dist*` is.
            self.unify(a.elem, b.elem, where)
            return
        raise TypeMismatchError(f"{where}: type mismatch, {a} vs {b}")

    def fresh(self, numeric=False):
        return TVar(numeric)

    # expression checking: returns (type, kind)

    def check_expr(self, e: Expr, env: dict, ctx: str):
        ty, kind = self._check(e, env, ctx)
        e.ty = ty
        e.kind = kind
        return ty, kind

    def _require_p_allowed(self, e, ctx, what):
        if ctx != P:
            raise KindError(f"{what} in a deterministic context", e.line, e.col)

    def _check(self, e: Expr, env: dict, ctx: str):
        if isinstance(e, Const):
            if e.value is NIL:
                return self.fresh(), D
            return _type_of_value(e.value), D
        if isinstance(e, Var):
            if e.name in env:
                return env[e.name], D
            raise TypeMismatchError(f"unbound variable {e.name!r}", e.line, e.col)
        if isinstance(e, Last):
            if e.name in env:
                return env[e.name], D
            raise TypeMismatchError(f"unbound variable {e.name!r}", e.line, e.col)
        if isinstance(e, Pair):
            t1, k1 = self.check_expr(e.fst, env, ctx)
            t2, k2 = self.check_expr(e.snd, env, ctx)
            return TPair(t1, t2), (P if P in (k1, k2) else D)
        if isinstance(e, OpApp):
            return self._check_op(e, env, ctx)
        if isinstance(e, Call):
            sig = self.sigs.get(e.fn)
            if sig is None:
                raise TypeMismatchError(f"unknown function {e.fn!r}", e.line, e.col)
            if sig.kind == P:
                self._require_p_allowed(e, ctx, f"call to probabilistic {e.fn!r}")
            targ, karg = self.check_expr(e.arg, env, ctx)
            if karg == P:
                raise KindError("function arguments must be deterministic", e.line, e.col)
            # instantiate param/ret together so shared variables stay linked
            inst = {}
            self.unify(targ, _instantiate(sig.param, inst, self), f"argument of {e.fn}")
            ret = _instantiate(sig.ret, inst, self)
            return ret, sig.kind
        if isinstance(e, WhereRec):
            inner = dict(env)
            for name, _ in e.inits:
                inner.setdefault(name, self.fresh())
            for name, _ in e.eqs:
                inner.setdefault(name, self.fresh())
            kind = D
            for name, ie in e.inits:
                t, k = self.check_expr(ie, inner, ctx)
                self.unify(inner[name], t, f"init {name}")
                kind = P if P in (kind, k) else kind
            for name, ee in e.eqs:
                t, k = self.check_expr(ee, inner, ctx)
                self.unify(inner[name], t, f"equation {name}")
                kind = P if P in (kind, k) else kind
            t, k = self.check_expr(e.result, inner, ctx)
            return t, (P if P in (kind, k) else D)
        if isinstance(e, Present):
            tc, kc = self.check_expr(e.cond, env, ctx)
            self.unify(tc, TBOOL, "present condition")
            t1, k1 = self.check_expr(e.then, env, ctx)
            t2, k2 = self.check_expr(e.els, env, ctx)
            self.unify(t1, t2, "present branches")
            return t1, (P if P in (kc, k1, k2) else D)
        if isinstance(e, Reset):
            t1, k1 = self.check_expr(e.body, env, ctx)
            t2, k2 = self.check_expr(e.every, env, ctx)
            self.unify(t2, TBOOL, "reset condition")
            return t1, (P if P in (k1, k2) else D)
        if isinstance(e, Sample):
            self._require_p_allowed(e, ctx, "sample")
            td, kd = self.check_expr(e.arg, env, ctx)
            if kd == P:
                raise KindError("the argument of sample must be deterministic", e.line, e.col)
            elem = self.fresh()
            self.unify(td, TDist(elem, False), "sample argument")
            return self.resolve(elem), P
        if isinstance(e, Observe):
            self._require_p_allowed(e, ctx, "observe")
            td, kd = self.check_expr(e.dist, env, ctx)
            tv, kv = self.check_expr(e.value, env, ctx)
            if P in (kd, kv):
                raise KindError("the arguments of observe must be deterministic", e.line, e.col)
            td = self.resolve(td)
            if isinstance(td, TDist):
                if not td.density:
                    raise TypeMismatchError(
                        "observe needs a distribution with a density", e.line, e.col
                    )
                self.unify(td.elem, tv, "observed value")
            else:
                self.unify(td, TDist(tv, True), "observe argument")
            return TUNIT, P
        if isinstance(e, Factor):
            self._require_p_allowed(e, ctx, "factor")
            t, k = self.check_expr(e.arg, env, ctx)
            if k == P:
                raise KindError("the argument of factor must be deterministic", e.line, e.col)
            self.unify(t, TFLOAT, "factor argument")
            return TUNIT, P
        if isinstance(e, Infer):
            t, _k = self.check_expr(e.model, env, P)
            if not (isinstance(e.model, Call) and self.sigs[e.model.fn].kind == P):
                raise KindError("infer expects a call to a proba declaration", e.line, e.col)
            return TDist(self.resolve(t), False), D
        raise TypeMismatchError(f"cannot check {type(e).__name__}", e.line, e.col)

    def _check_op(self, e: OpApp, env: dict, ctx: str):
        info = OPS.get(e.op)
        if info is None:
            raise TypeMismatchError(f"unknown operator {e.op!r}", e.line, e.col)
        if info.kind == P:
            self._require_p_allowed(e, ctx, f"operator {e.op!r}")
        targ, karg = self.check_expr(e.arg, env, ctx)
        kind = P if (karg == P or info.kind == P) else D
        sig = info.sig
        where = f"operator {e.op}"
        if sig == "arith":
            a = self.fresh(numeric=True)
            self.unify(targ, TPair(a, a), where)
            return self.resolve(a), kind
        if sig == "arith1":
            a = self.fresh(numeric=True)
            self.unify(targ, a, where)
            return self.resolve(a), kind
        if sig == "cmp":
            a = self.fresh()
            self.unify(targ, TPair(a, a), where)
            return TBOOL, kind
        if sig == "bool2":
            self.unify(targ, TPair(TBOOL, TBOOL), where)
            return TBOOL, kind
        if sig == "bool1":
            self.unify(targ, TBOOL, where)
            return TBOOL, kind
        if sig == "ifte":
            a = self.fresh()
            self.unify(targ, TPair(TBOOL, TPair(a, a)), where)
            return self.resolve(a), kind
        if sig == "float1":
            self.unify(targ, TFLOAT, where)
            return TFLOAT, kind
        if sig == "tofloat":
            a = self.fresh(numeric=True)
            self.unify(targ, a, where)
            return TFLOAT, kind
        if sig == "matmul":
            a = self.fresh()
            self.unify(targ, TPair(TMat(), a), where)
            return self.resolve(a), kind
        if sig == "matadd":
            a = self.fresh()
            self.unify(targ, TPair(a, a), where)
            return self.resolve(a), kind
        if sig == "vec_get":
            self.unify(targ, TPair(TVec(), TINT), where)
            return TFLOAT, kind
        if sig == "nth":
            a = self.fresh()
            self.unify(targ, TPair(a, TINT), where)
            elem = self.fresh()
            spine = self.resolve(a)
            while isinstance(spine, TPair):
                self.unify(spine.fst, elem, where)
                spine = self.resolve(spine.snd)
            self.unify(spine, elem, where)
            return self.resolve(elem), kind
        if sig == "dist_ff":
            self.unify(targ, TPair(TFLOAT, TFLOAT), where)
            return TDist(TFLOAT, True), kind
        if sig == "dist_bern":
            self.unify(targ, TFLOAT, where)
            return TDist(TBOOL, True), kind
        if sig == "dist_mv":
            self.unify(targ, TPair(TVec(), TMat()), where)
            return TDist(TVec(), True), kind
        if sig == "dist_pois":
            self.unify(targ, TFLOAT, where)
            return TDist(TINT, True), kind
        if sig == "dist_dirac":
            a = self.fresh()
            self.unify(targ, a, where)
            return TDist(self.resolve(a), False), kind
        if sig == "dist_mean":
            elem = self.fresh()
            self.unify(targ, TDist(elem, False), where)
            elem = self.resolve(elem)
            if e.op == "variance":
                if isinstance(elem, TVec):
                    return TMat(), kind
            return elem, kind
        if sig == "lqr":
            self.unify(targ, TPair(TMat(), TPair(TMat(), TVec())), where)
            return TVec(), kind
        if sig == "eval":
            a = self.fresh()
            self.unify(targ, a, where)
            return self.resolve(a), kind
        raise TypeMismatchError(f"operator {e.op!r} has no signature", e.line, e.col)

    # declarations

    def check_program(self, prog: Program):
        env0 = {name: _type_of_value(v) for name, v in self.globals_env.items()}
        const_types = {}
        for d in prog.decls:
            if d.is_const:
                t, k = self.check_expr(d.body, {**env0, **const_types}, D)
                if k == P:
                    raise KindError("constant declarations must be deterministic", d.line, None)
                const_types[d.name] = t
                continue
            env = {**env0, **const_types}
            param_ty = self._bind_param(d.param, env)
            ctx = P if d.is_proba else D
            ret, kind = self.check_expr(d.body, env, ctx)
            if not d.is_proba and kind == P:
                raise KindError(
                    f"node {d.name!r} has a probabilistic body; declare it proba", d.line, None
                )
            self.sigs[d.name] = FnSig(
                self.deep_resolve(param_ty), P if d.is_proba else D, self.deep_resolve(ret)
            )
        return self.sigs

    def _bind_param(self, param, env):
        if param is None or isinstance(param, PUnit):
            return TUNIT
        if isinstance(param, PVar):
            t = self.fresh()
            env[param.name] = t
            return t
        if isinstance(param, PTuple):
            ts = [self._bind_param(p, env) for p in param.items]
            t = ts[-1]
            for item in reversed(ts[:-1]):
                t = TPair(item, t)
            return t
        raise TypeMismatchError(f"bad parameter pattern {param}")


def _instantiate(t, mapping, checker):
    t = checker.resolve(t)
    if isinstance(t, TVar):
        if t.tid not in mapping:
            mapping[t.tid] = checker.fresh(t.numeric)
        return mapping[t.tid]
    if isinstance(t, TPair):
        return TPair(_instantiate(t.fst, mapping, checker), _instantiate(t.snd, mapping, checker))
    if isinstance(t, TDist):
        return TDist(_instantiate(t.elem, mapping, checker), t.density)
    return t


def kind_check(prog: Program, globals_env=None):
    """Annotate every expression with its kind and type.

    Returns the signature table {name: FnSig}.  `globals_env` maps ambient
    constant names to their runtime values (types are derived from them).
    """
    checker = Checker(globals_env)
    sigs = checker.check_program(prog)
    _default_numeric(prog, checker)
    return sigs


def _default_numeric(prog: Program, checker: Checker):
    # Unconstrained numeric type variables default to float.
    def walk(e):
        if isinstance(e, Expr):
            t = checker.resolve(e.ty) if e.ty is not None else None
            if isinstance(t, TVar) and t.numeric:
                checker.subst[t.tid] = TFLOAT
            e.ty = checker.deep_resolve(e.ty) if e.ty is not None else None
            from .ast import children

            for c in children(e):
                walk(c)

    for d in prog.decls:
        walk(d.body)
