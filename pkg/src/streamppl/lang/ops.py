"""Builtin operator table: arities, kinds, and concrete implementations.

Operators are strict stream functions: all arguments are computed at every
step.  `ifte` is the value-level conditional that the surface `if` parses to;
it differs from `present`, whose branches advance lazily.
"""

from __future__ import annotations

import math

import numpy as np

from .. import dists
from ..errors import EvalError, UninitializedReadError
from .ast import NIL


def _num2(f):
    def g(a, b):
        if a is NIL or b is NIL:
            return NIL
        return f(a, b)

    return g


def _num1(f):
    def g(a):
        if a is NIL:
            return NIL
        return f(a)

    return g


def _need(v, what):
    if v is NIL:
        raise UninitializedReadError(f"nil value reached {what}")
    return v


def _ifte(c, t, e):
    if c is NIL:
        raise UninitializedReadError("nil value used as a condition")
    return t if c else e


def _mat_mul(a, b):
    if a is NIL or b is NIL:
        return NIL
    return np.asarray(a) @ np.asarray(b)


def _mat_add(a, b):
    if a is NIL or b is NIL:
        return NIL
    return np.asarray(a) + np.asarray(b)


def _vec_get(v, i):
    if v is NIL or i is NIL:
        return NIL
    return float(np.asarray(v)[int(i)])


def _nth(t, i):
    """Select the i-th leaf of a right-nested pair chain."""
    if t is NIL or i is NIL:
        return NIL
    i = int(i)
    node = t
    for _ in range(i):
        if not isinstance(node, tuple):
            raise EvalError("nth index out of range")
        node = node[1]
    if isinstance(node, tuple):
        return node[0]
    return node


def _gaussian(m, v):
    return dists.Gaussian(float(_need(m, "gaussian")), float(_need(v, "gaussian")))


def _beta(a, b):
    return dists.Beta(float(_need(a, "beta")), float(_need(b, "beta")))


def _bernoulli(p):
    return dists.Bernoulli(float(_need(p, "bernoulli")))


def _mv_gaussian(m, cov):
    return dists.MvGaussian(np.asarray(_need(m, "mv_gaussian"), dtype=float),
                            np.asarray(_need(cov, "mv_gaussian"), dtype=float))


def _poisson(r):
    return dists.Poisson(float(_need(r, "poisson")))


def _dirac(v):
    return dists.Dirac(_need(v, "dirac"))


def _mean(d):
    # nil flows through analysis operators so discarded first-step branches
    # of the strict arrow rewrite stay harmless
    if d is NIL:
        return NIL
    return dists.mean(d)


def _variance(d):
    if d is NIL:
        return NIL
    return dists.variance(d)


def _lqr_op(a, b, xhat):
    # Controller feedback: u = -K xhat with K memoized per (A, B) and Q = R = I.
    if a is NIL or b is NIL or xhat is NIL:
        return NIL
    from ..bench.lqr import cached_feedback_gain

    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    k = cached_feedback_gain(a, b)
    return -(k @ np.asarray(xhat, dtype=float).reshape(-1))


class OpInfo:
    __slots__ = ("name", "arity", "fn", "kind", "sig")

    def __init__(self, name, arity, fn, kind="D", sig=None):
        self.name = name
        self.arity = arity
        self.fn = fn
        self.kind = kind
        self.sig = sig  # handled specially by the checker


OPS = {}


def _register(name, arity, fn, kind="D", sig=None):
    OPS[name] = OpInfo(name, arity, fn, kind, sig)


_register("+", 2, _num2(lambda a, b: a + b), sig="arith")
_register("-", 2, _num2(lambda a, b: a - b), sig="arith")
_register("*", 2, _num2(lambda a, b: a * b), sig="arith")
_register("/", 2, _num2(lambda a, b: a / b), sig="arith")
_register("~-", 1, _num1(lambda a: -a), sig="arith1")
_register("=", 2, lambda a, b: _need(a, "=") == _need(b, "="), sig="cmp")
_register("<>", 2, lambda a, b: _need(a, "<>") != _need(b, "<>"), sig="cmp")
_register("<", 2, lambda a, b: _need(a, "<") < _need(b, "<"), sig="cmp")
_register(">", 2, lambda a, b: _need(a, ">") > _need(b, ">"), sig="cmp")
_register("<=", 2, lambda a, b: _need(a, "<=") <= _need(b, "<="), sig="cmp")
_register(">=", 2, lambda a, b: _need(a, ">=") >= _need(b, ">="), sig="cmp")
_register("&&", 2, lambda a, b: bool(_need(a, "&&")) and bool(_need(b, "&&")), sig="bool2")
_register("||", 2, lambda a, b: bool(_need(a, "||")) or bool(_need(b, "||")), sig="bool2")
_register("not", 1, lambda a: not _need(a, "not"), sig="bool1")
_register("ifte", 3, _ifte, sig="ifte")
_register("exp", 1, _num1(math.exp), sig="float1")
_register("log", 1, _num1(math.log), sig="float1")
_register("sqrt", 1, _num1(math.sqrt), sig="float1")
_register("abs", 1, _num1(abs), sig="arith1")
_register("min", 2, _num2(min), sig="arith")
_register("max", 2, _num2(max), sig="arith")
_register("float", 1, _num1(float), sig="tofloat")
_register("*@", 2, _mat_mul, sig="matmul")
_register("+@", 2, _mat_add, sig="matadd")
_register("vec_get", 2, _vec_get, sig="vec_get")
_register("nth", 2, _nth, sig="nth")
_register("gaussian", 2, _gaussian, sig="dist_ff")
_register("beta", 2, _beta, sig="dist_ff")
_register("bernoulli", 1, _bernoulli, sig="dist_bern")
_register("mv_gaussian", 2, _mv_gaussian, sig="dist_mv")
_register("poisson", 1, _poisson, sig="dist_pois")
_register("dirac", 1, _dirac, sig="dist_dirac")
_register("mean", 1, _mean, sig="dist_mean")
_register("variance", 1, _variance, sig="dist_mean")
_register("lqr", 3, _lqr_op, sig="lqr")
# `eval` forces a symbolic value; in concrete evaluators it is the identity.
_register("eval", 1, lambda v: v, kind="P", sig="eval")

DIST_CONSTRUCTORS = {"gaussian", "beta", "bernoulli", "mv_gaussian", "poisson", "dirac"}
