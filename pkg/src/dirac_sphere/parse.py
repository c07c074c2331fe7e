"""Recursive-descent parser for phase-space expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT | VAR | "R" | "hbar" | call | "(" expr ")"
    VAR    := ("x" | "p" | "Q" | "P") INT
    call   := "sq(x)" | "sq(p)" | "dot(x,p)" | "dot(p,x)" | "L(" INT "," INT ")"

Division is accepted only when the divisor is a unit, i.e. a rational
constant times powers of ``R``, ``sq(x)`` and ``sq(x)+P1``.
"""

from __future__ import annotations

import re

from .expr import DenominatorError, PhaseExpr, PhaseSpace

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


def _tokenize(text: str):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("int", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ctx: PhaseSpace):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def parse(self) -> PhaseExpr:
        e = self.expr()
        kind, v, pos = self.tok
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.tok[0] == "op" and self.tok[1] in ("*", "/"):
            op, pos = self.take()[1:]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if not rhs:
                    raise ParseError("division by zero", pos)
                try:
                    e = e / rhs
                except DenominatorError as err:
                    raise ParseError(str(err), pos) from None
        return e

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] in ("+", "-"):
            op = self.take()[1]
            e = self.unary()
            return -e if op == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            pos = self.take()[2]
            neg = False
            if self.tok[1] == "-":
                self.take()
                neg = True
            kind, v, p = self.take()
            if kind != "int":
                raise ParseError("exponent must be an integer", p)
            k = -int(v) if neg else int(v)
            try:
                return base**k
            except (DenominatorError, ZeroDivisionError) as err:
                raise ParseError(str(err), pos) from None
        return base

    def _index(self, name: str, pos: int):
        kind, idx = name[0], int(name[1:])
        try:
            return self.ctx.var(kind, idx)
        except (IndexError, ValueError) as err:
            raise ParseError(f"index out of range: {name} ({err})", pos) from None

    def atom(self):
        kind, v, pos = self.take()
        ctx = self.ctx
        if kind == "int":
            return ctx.const(int(v))
        if kind == "op" and v == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if v == "R":
                return ctx.R
            if v == "hbar":
                return ctx.hbar
            if re.fullmatch(r"[xpQP]\d+", v):
                return self._index(v, pos)
            if v == "sq":
                self.expect("(")
                arg = self.take()
                self.expect(")")
                if arg[1] == "x":
                    return ctx.sq_x
                if arg[1] == "p":
                    return ctx.sq_p
                raise ParseError("sq() takes x or p", arg[2])
            if v == "dot":
                self.expect("(")
                a = self.take()[1]
                self.expect(",")
                b = self.take()[1]
                self.expect(")")
                if {a, b} != {"x", "p"}:
                    raise ParseError("dot() takes (x,p)", pos)
                return ctx.dot_xp
            if v == "L":
                self.expect("(")
                i = self.take()
                self.expect(",")
                j = self.take()
                self.expect(")")
                if i[0] != "int" or j[0] != "int":
                    raise ParseError("L() takes two integer indices", pos)
                i, j = int(i[1]), int(j[1])
                if not (1 <= i <= ctx.N and 1 <= j <= ctx.N):
                    raise ParseError(f"index out of range: L({i},{j})", pos)
                return ctx.angular(i, j)
            raise ParseError(f"unknown identifier {v!r}", pos)
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)


def parse_expr(text: str, ctx: PhaseSpace) -> PhaseExpr:
    return _Parser(text, ctx).parse()
