"""Symbolic runtime values referencing graph nodes.

Concrete values stay plain Python objects; a SymExpr appears only when a
value actually depends on an unrealized random variable.  Affine structure is
kept in canonical form (nested affine terms collapse) so conjugacy detection
is a syntactic check on one shape.
"""

from __future__ import annotations

import numpy as np

from ..lang.ast import NIL
from ..lang.ops import OPS


class SymExpr:
    __slots__ = ()


class RVar(SymExpr):
    """Reference to a graph node."""

    __slots__ = ("node",)

    def __init__(self, node):
        self.node = node

    def __repr__(self):
        return f"rv#{self.node.nid}"


class SAffine(SymExpr):
    """a * node + b, scalar."""

    __slots__ = ("a", "node", "b")

    def __init__(self, a, node, b):
        self.a = float(a)
        self.node = node
        self.b = float(b)

    def __repr__(self):
        return f"({self.a}*rv#{self.node.nid}+{self.b})"


class SLinVec(SymExpr):
    """h . node + b: scalar-valued linear functional of a vector node."""

    __slots__ = ("h", "node", "b")

    def __init__(self, h, node, b):
        self.h = np.asarray(h, dtype=float).reshape(-1)
        self.node = node
        self.b = float(b)

    def __repr__(self):
        return f"(h.rv#{self.node.nid}+{self.b})"


class SAffineVec(SymExpr):
    """A @ node + b: vector-valued affine image of a vector node."""

    __slots__ = ("a", "node", "b")

    def __init__(self, a, node, b):
        self.a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float).reshape(-1) if not np.isscalar(b) else None
        if b is None:
            b = np.zeros(self.a.shape[0])
        self.node = node
        self.b = b

    def __repr__(self):
        return f"(A@rv#{self.node.nid}+b)"


class SApp(SymExpr):
    """Uninterpreted operator application over symbolic arguments."""

    __slots__ = ("op", "args")

    def __init__(self, op, args):
        self.op = op
        self.args = tuple(args)

    def __repr__(self):
        return f"{self.op}{self.args!r}"


class SPair(SymExpr):
    __slots__ = ("fst", "snd")

    def __init__(self, fst, snd):
        self.fst = fst
        self.snd = snd

    def __repr__(self):
        return f"({self.fst!r}, {self.snd!r})"


def is_symbolic(v) -> bool:
    return isinstance(v, SymExpr)


def _as_scalar_affine(v):
    """(a, node, b) when v is a scalar affine image of one node, else None."""
    if isinstance(v, RVar):
        return (1.0, v.node, 0.0)
    if isinstance(v, SAffine):
        return (v.a, v.node, v.b)
    return None


def make_pair(a, b):
    if is_symbolic(a) or is_symbolic(b):
        return SPair(a, b)
    return (a, b)


def _num(v):
    return isinstance(v, (int, float, bool, np.floating, np.integer))


def sym_add(x, y):
    if x is NIL or y is NIL:
        return NIL
    sx, sy = is_symbolic(x), is_symbolic(y)
    if not sx and not sy:
        return x + y
    if sx and not sy and _num(y):
        aff = _as_scalar_affine(x)
        if aff:
            return SAffine(aff[0], aff[1], aff[2] + float(y))
        if isinstance(x, SLinVec):
            return SLinVec(x.h, x.node, x.b + float(y))
    if sy and not sx and _num(x):
        return sym_add(y, x)
    return SApp("+", (x, y))


def sym_sub(x, y):
    if x is NIL or y is NIL:
        return NIL
    if not is_symbolic(x) and not is_symbolic(y):
        return x - y
    if not is_symbolic(y) and _num(y):
        return sym_add(x, -float(y))
    if not is_symbolic(x) and _num(x):
        return sym_add(sym_mul(-1.0, y), float(x))
    return SApp("-", (x, y))


def sym_mul(x, y):
    if x is NIL or y is NIL:
        return NIL
    sx, sy = is_symbolic(x), is_symbolic(y)
    if not sx and not sy:
        return x * y
    if sx and not sy and _num(y):
        return sym_mul(y, x)
    if sy and not sx and _num(x):
        c = float(x)
        aff = _as_scalar_affine(y)
        if aff:
            return SAffine(c * aff[0], aff[1], c * aff[2])
        if isinstance(y, SLinVec):
            return SLinVec(c * y.h, y.node, c * y.b)
        if isinstance(y, SAffineVec):
            return SAffineVec(c * y.a, y.node, c * y.b)
    return SApp("*", (x, y))


def sym_div(x, y):
    if x is NIL or y is NIL:
        return NIL
    if not is_symbolic(x) and not is_symbolic(y):
        return x / y
    if not is_symbolic(y) and _num(y):
        return sym_mul(1.0 / float(y), x)
    return SApp("/", (x, y))


def sym_neg(x):
    if x is NIL:
        return NIL
    if not is_symbolic(x):
        return -x
    return sym_mul(-1.0, x)


def sym_matmul(m, v):
    if m is NIL or v is NIL:
        return NIL
    if not is_symbolic(m) and not is_symbolic(v):
        return np.asarray(m) @ np.asarray(v)
    if not is_symbolic(m):
        m = np.asarray(m, dtype=float)
        if isinstance(v, RVar):
            return SAffineVec(m, v.node, np.zeros(m.shape[0]))
        if isinstance(v, SAffineVec):
            return SAffineVec(m @ v.a, v.node, m @ v.b)
    return SApp("*@", (m, v))


def sym_matadd(x, y):
    if x is NIL or y is NIL:
        return NIL
    if not is_symbolic(x) and not is_symbolic(y):
        return np.asarray(x) + np.asarray(y)
    if isinstance(x, SAffineVec) and not is_symbolic(y):
        return SAffineVec(x.a, x.node, x.b + np.asarray(y, dtype=float).reshape(-1))
    if isinstance(y, SAffineVec) and not is_symbolic(x):
        return SAffineVec(y.a, y.node, y.b + np.asarray(x, dtype=float).reshape(-1))
    return SApp("+@", (x, y))


def sym_vec_get(v, i):
    if v is NIL or i is NIL:
        return NIL
    if not is_symbolic(v):
        return float(np.asarray(v)[int(i)])
    i = int(i)
    if isinstance(v, RVar):
        dim = _node_dim(v.node)
        h = np.zeros(dim)
        h[i] = 1.0
        return SLinVec(h, v.node, 0.0)
    if isinstance(v, SAffineVec):
        return SLinVec(v.a[i], v.node, float(v.b[i]))
    return SApp("vec_get", (v, i))


def _node_dim(node):
    from ..dists import MvGaussian
    from .conjugacy import MvAffineGaussianCond

    if node.marginal is not None and isinstance(node.marginal, MvGaussian):
        return node.marginal.mu.size
    if node.cond is not None and isinstance(node.cond, MvAffineGaussianCond):
        return node.cond.a.shape[0]
    raise ValueError("cannot infer vector dimension of node")


def sym_nth(t, i):
    if t is NIL or i is NIL:
        return NIL
    i = int(i)
    node = t
    for _ in range(i):
        node = node.snd if isinstance(node, SPair) else node[1]
    if isinstance(node, SPair):
        return node.fst
    if isinstance(node, tuple):
        return node[0]
    return node


_SYM_BINOPS = {
    "+": sym_add,
    "-": sym_sub,
    "*": sym_mul,
    "/": sym_div,
    "*@": sym_matmul,
    "+@": sym_matadd,
    "vec_get": sym_vec_get,
    "nth": sym_nth,
}


def sym_apply(op, args):
    """Apply an operator over possibly-symbolic arguments.

    Falls back to an uninterpreted application when no affine rule fits;
    fully concrete arguments are evaluated directly.
    """
    if not any(is_symbolic(a) for a in args):
        info = OPS[op]
        return info.fn(*args)
    if op == "~-":
        return sym_neg(args[0])
    fn = _SYM_BINOPS.get(op)
    if fn is not None and len(args) == 2:
        return fn(args[0], args[1])
    return SApp(op, tuple(args))


def sym_nodes(v, out):
    """Collect graph nodes referenced by a runtime value into `out`."""
    if isinstance(v, RVar):
        out.append(v.node)
    elif isinstance(v, (SAffine, SLinVec, SAffineVec)):
        out.append(v.node)
    elif isinstance(v, SApp):
        for a in v.args:
            sym_nodes(a, out)
    elif isinstance(v, SPair):
        sym_nodes(v.fst, out)
        sym_nodes(v.snd, out)
    elif isinstance(v, tuple):
        for a in v:
            sym_nodes(a, out)


def remap_value(v, mapping):
    """Rewrite node references through `mapping` (graph deep copies)."""
    if isinstance(v, RVar):
        return RVar(mapping[v.node])
    if isinstance(v, SAffine):
        return SAffine(v.a, mapping[v.node], v.b)
    if isinstance(v, SLinVec):
        return SLinVec(v.h, mapping[v.node], v.b)
    if isinstance(v, SAffineVec):
        return SAffineVec(v.a, mapping[v.node], v.b)
    if isinstance(v, SApp):
        return SApp(v.op, tuple(remap_value(a, mapping) for a in v.args))
    if isinstance(v, SPair):
        return SPair(remap_value(v.fst, mapping), remap_value(v.snd, mapping))
    if isinstance(v, tuple):
        return tuple(remap_value(a, mapping) for a in v)
    return v
