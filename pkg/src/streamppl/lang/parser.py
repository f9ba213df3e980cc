"""Recursive-descent parser for the kernel language.

Source files are UTF-8 text (conventionally `.rpz`).  A program is a sequence
of `let node f p = e`, `let proba f p = e`, and `let x = e` constant
declarations.  Comments use `(* ... *)` and may nest.
"""

from __future__ import annotations

import re

from ..errors import DuplicateNameError, ParseError, UnboundVariableError
from .ast import (
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
    SugarArrow,
    SugarPre,
    Var,
    WhereRec,
    children,
)
from .ops import OPS

KEYWORDS = {
    "let", "node", "proba", "where", "rec", "and", "init", "last", "pre",
    "present", "reset", "every", "if", "then", "else", "sample", "observe",
    "factor", "infer", "eval", "true", "false", "not",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\(\*)
  | (?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+\.?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>->|\+@|\*@|\+\.|-\.|\*\.|/\.|<=|>=|<>|&&|\|\||[-+*/=<>(),_])
    """,
    re.VERBOSE,
)

# Float-suffixed arithmetic is treated as plain arithmetic.
_OP_ALIASES = {"+.": "+", "-.": "-", "*.": "*", "/.": "/"}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}({self.text!r})@{self.line}:{self.col}"


def tokenize(source: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        col = pos - line_start + 1
        if m.lastgroup == "ws":
            line += m.group().count("\n")
            if "\n" in m.group():
                line_start = m.start() + m.group().rindex("\n") + 1
            pos = m.end()
            continue
        if m.lastgroup == "comment":
            depth = 1
            pos = m.end()
            while depth > 0:
                if pos >= n:
                    raise ParseError("unterminated comment", line, col)
                if source.startswith("(*", pos):
                    depth += 1
                    pos += 2
                elif source.startswith("*)", pos):
                    depth -= 1
                    pos += 2
                else:
                    if source[pos] == "\n":
                        line += 1
                        line_start = pos + 1
                    pos += 1
            continue
        text = m.group()
        kind = m.lastgroup
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        if kind == "op":
            text = _OP_ALIASES.get(text, text)
        tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0
        self._fresh = 0

    # token helpers

    def peek(self, ahead=0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at(self, kind, text=None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind, text=None) -> Token:
        t = self.peek()
        if not self.at(kind, text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def fresh(self, base) -> str:
        self._fresh += 1
        return f"_{base}{self._fresh}"

    # declarations

    def parse_program(self) -> Program:
        decls = []
        while not self.at("eof"):
            decls.append(self.parse_decl())
        return Program(decls)

    def parse_decl(self) -> Decl:
        t = self.expect("kw", "let")
        if self.at("kw", "node") or self.at("kw", "proba"):
            is_proba = self.next().text == "proba"
            name = self.expect("ident").text
            param = self.parse_param()
            self.expect("op", "=")
            body = self.parse_expr()
            return Decl(name, param, body, is_proba, line=t.line)
        name = self.expect("ident").text
        self.expect("op", "=")
        body = self.parse_expr()
        return Decl(name, None, body, False, line=t.line)

    def parse_param(self):
        if self.at("ident"):
            return PVar(self.next().text)
        self.expect("op", "(")
        if self.at("op", ")"):
            self.next()
            return PUnit()
        names = [self.expect("ident").text]
        while self.at("op", ","):
            self.next()
            names.append(self.expect("ident").text)
        self.expect("op", ")")
        if len(names) == 1:
            return PVar(names[0])
        return PTuple(tuple(PVar(n) for n in names))

    # expressions; precedence: where < -> < || < && < cmp < add < mul < unary < app

    def parse_expr(self) -> Expr:
        e = self.parse_arrow()
        if self.at("kw", "where"):
            self.next()
            self.expect("kw", "rec")
            inits, eqs = self.parse_equations()
            t = self.peek()
            w = WhereRec(result=e, inits=inits, eqs=eqs)
            w.at(t.line, t.col)
            return w
        return e

    def parse_equations(self):
        inits = []
        eqs = []
        while True:
            if self.at("kw", "init"):
                self.next()
                name = self.expect("ident").text
                self.expect("op", "=")
                inits.append((name, self.parse_arrow()))
            else:
                name = self.parse_eq_lhs()
                self.expect("op", "=")
                eqs.append((name, self.parse_arrow()))
            if self.at("kw", "and"):
                self.next()
                continue
            break
        return inits, eqs

    def parse_eq_lhs(self) -> str:
        if self.at("ident"):
            return self.next().text
        if self.at("op", "_"):
            self.next()
            return self.fresh("wild")
        if self.at("op", "("):
            self.next()
            self.expect("op", ")")
            return self.fresh("unit")
        t = self.peek()
        raise ParseError(f"expected an equation left-hand side, found {t.text!r}", t.line, t.col)

    def parse_arrow(self) -> Expr:
        e = self.parse_or()
        if self.at("op", "->"):
            t = self.next()
            rest = self.parse_arrow()
            return SugarArrow(first=e, rest=rest).at(t.line, t.col)
        return e

    def parse_or(self) -> Expr:
        e = self.parse_and()
        while self.at("op", "||"):
            t = self.next()
            rhs = self.parse_and()
            e = OpApp(op="||", arg=Pair(fst=e, snd=rhs)).at(t.line, t.col)
        return e

    def parse_and(self) -> Expr:
        e = self.parse_cmp()
        while self.at("op", "&&"):
            t = self.next()
            rhs = self.parse_cmp()
            e = OpApp(op="&&", arg=Pair(fst=e, snd=rhs)).at(t.line, t.col)
        return e

    def parse_cmp(self) -> Expr:
        e = self.parse_add()
        if self.peek().kind == "op" and self.peek().text in ("=", "<>", "<", ">", "<=", ">="):
            t = self.next()
            rhs = self.parse_add()
            e = OpApp(op=t.text, arg=Pair(fst=e, snd=rhs)).at(t.line, t.col)
        return e

    def parse_add(self) -> Expr:
        e = self.parse_mul()
        while self.peek().kind == "op" and self.peek().text in ("+", "-", "+@"):
            t = self.next()
            rhs = self.parse_mul()
            e = OpApp(op=t.text, arg=Pair(fst=e, snd=rhs)).at(t.line, t.col)
        return e

    def parse_mul(self) -> Expr:
        e = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/", "*@"):
            t = self.next()
            rhs = self.parse_unary()
            e = OpApp(op=t.text, arg=Pair(fst=e, snd=rhs)).at(t.line, t.col)
        return e

    def parse_unary(self) -> Expr:
        if self.at("op", "-"):
            t = self.next()
            e = self.parse_unary()
            if isinstance(e, Const) and isinstance(e.value, (int, float)):
                return Const(value=-e.value).at(t.line, t.col)
            return OpApp(op="~-", arg=e).at(t.line, t.col)
        if self.at("kw", "not"):
            t = self.next()
            return OpApp(op="not", arg=self.parse_unary()).at(t.line, t.col)
        if self.at("kw", "pre"):
            t = self.next()
            return SugarPre(arg=self.parse_unary()).at(t.line, t.col)
        return self.parse_app()

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("number", "ident"):
            return True
        if t.kind == "op" and t.text == "(":
            return True
        if t.kind == "kw" and t.text in ("true", "false", "last", "pre"):
            return True
        return False

    def parse_app(self) -> Expr:
        e = self.parse_atom()
        # juxtaposed application: ops consume their arity, nodes one argument
        if isinstance(e, Var) and self._starts_atom():
            name = e.name
            if name in OPS:
                arity = OPS[name].arity
                args = [self.parse_atom() for _ in range(arity)]
                arg = args[-1]
                for a in reversed(args[:-1]):
                    arg = Pair(fst=a, snd=arg)
                return OpApp(op=name, arg=arg).at(e.line, e.col)
            arg = self.parse_atom()
            return Call(fn=name, arg=arg).at(e.line, e.col)
        return e

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.kind == "number":
            self.next()
            if "." in t.text or "e" in t.text or "E" in t.text:
                return Const(value=float(t.text)).at(t.line, t.col)
            return Const(value=int(t.text)).at(t.line, t.col)
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.next()
                return Const(value=(t.text == "true")).at(t.line, t.col)
            if t.text == "last":
                self.next()
                name = self.expect("ident").text
                return Last(name=name).at(t.line, t.col)
            if t.text == "pre":
                self.next()
                return SugarPre(arg=self.parse_unary()).at(t.line, t.col)
            if t.text == "if":
                self.next()
                cond = self.parse_arrow()
                self.expect("kw", "then")
                then = self.parse_arrow()
                self.expect("kw", "else")
                els = self.parse_arrow()
                return OpApp(op="ifte", arg=Pair(fst=cond, snd=Pair(fst=then, snd=els))).at(
                    t.line, t.col
                )
            if t.text == "present":
                self.next()
                cond = self.parse_or()
                self.expect("op", "->")
                then = self.parse_arrow()
                self.expect("kw", "else")
                els = self.parse_arrow()
                return Present(cond=cond, then=then, els=els).at(t.line, t.col)
            if t.text == "reset":
                self.next()
                body = self.parse_arrow()
                self.expect("kw", "every")
                every = self.parse_arrow()
                return Reset(body=body, every=every).at(t.line, t.col)
            if t.text == "sample":
                self.next()
                return Sample(arg=self.parse_atom()).at(t.line, t.col)
            if t.text == "factor":
                self.next()
                return Factor(arg=self.parse_atom()).at(t.line, t.col)
            if t.text == "eval":
                self.next()
                return OpApp(op="eval", arg=self.parse_atom()).at(t.line, t.col)
            if t.text == "observe":
                self.next()
                self.expect("op", "(")
                dist = self.parse_arrow()
                self.expect("op", ",")
                value = self.parse_arrow()
                self.expect("op", ")")
                return Observe(dist=dist, value=value).at(t.line, t.col)
            if t.text == "infer":
                self.next()
                n_tok = self.expect("number")
                if "." in n_tok.text:
                    raise ParseError("infer expects an integer particle count", n_tok.line, n_tok.col)
                fn = self.expect("ident").text
                arg = self.parse_atom()
                call = Call(fn=fn, arg=arg).at(t.line, t.col)
                return Infer(particles=int(n_tok.text), model=call).at(t.line, t.col)
            raise ParseError(f"unexpected keyword {t.text!r}", t.line, t.col)
        if t.kind == "ident":
            self.next()
            return Var(name=t.text).at(t.line, t.col)
        if t.kind == "op" and t.text == "(":
            self.next()
            if self.at("op", ")"):
                tt = self.next()
                return Const(value=()).at(tt.line, tt.col)
            items = [self.parse_arrow()]
            while self.at("op", ","):
                self.next()
                items.append(self.parse_arrow())
            self.expect("op", ")")
            e = items[-1]
            for item in reversed(items[:-1]):
                e = Pair(fst=item, snd=e).at(t.line, t.col)
            return e
        raise ParseError(f"unexpected token {t.text!r}", t.line, t.col)


def _pattern_names(p):
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PTuple):
        out = []
        for item in p.items:
            out.extend(_pattern_names(item))
        return out
    return []


def _resolve_expr(e: Expr, scope: set, decls: dict):
    if isinstance(e, Var):
        if e.name not in scope:
            raise UnboundVariableError(f"unbound variable {e.name!r}", e.line, e.col)
        return
    if isinstance(e, Last):
        if e.name not in scope:
            raise UnboundVariableError(f"unbound variable {e.name!r} under last", e.line, e.col)
        return
    if isinstance(e, Call):
        if e.fn not in decls:
            raise UnboundVariableError(f"unknown function {e.fn!r}", e.line, e.col)
        _resolve_expr(e.arg, scope, decls)
        return
    if isinstance(e, Infer):
        _resolve_expr(e.model, scope, decls)
        return
    if isinstance(e, WhereRec):
        inner = scope | {n for n, _ in e.inits} | {n for n, _ in e.eqs}
        for _, init_e in e.inits:
            _resolve_expr(init_e, inner, decls)
        for _, eq_e in e.eqs:
            _resolve_expr(eq_e, inner, decls)
        _resolve_expr(e.result, inner, decls)
        return
    for c in children(e):
        _resolve_expr(c, scope, decls)


def parse(source: str, predefined=()) -> Program:
    """Parse source text into a program.

    `predefined` lists names the program may reference without declaring
    (ambient constants supplied by the host at run time).  Unbound variables
    and duplicate top-level names are rejected here.
    """
    program = Parser(tokenize(source)).parse_program()
    decls = {}
    consts = set(predefined)
    for d in program.decls:
        if d.name in decls or d.name in consts:
            raise DuplicateNameError(f"duplicate top-level name {d.name!r}", d.line, None)
        if d.is_const:
            _resolve_expr(d.body, consts, decls)
            consts.add(d.name)
        else:
            scope = consts | set(_pattern_names(d.param))
            _resolve_expr(d.body, scope, decls)
            decls[d.name] = d
    return program
