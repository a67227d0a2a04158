"""Small arithmetic-expression compiler for user-defined objectives.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

Variables are ``x1 .. xd``; constants ``pi`` and ``e``. Compiled expressions
evaluate on arrays of shape ``(..., d)``.
"""

from __future__ import annotations

import operator
import re

import numpy as np

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
}
CONSTANTS = {"pi": np.pi, "e": np.e}
BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv, "^": np.power}

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


class ExpressionError(ValueError):
    pass


def tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r} at position {pos}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", float(num)))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, dimension):
        self.tokens = tokens
        self.i = 0
        self.dimension = dimension
        self.max_var = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise ExpressionError(f"expected {want}, got {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] is not None:
            raise ExpressionError(f"trailing input at {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = _binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = _binary(op, node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.unary()
            return lambda x: -inner(x)
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return _binary("^", base, self.unary())
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return lambda x, v=value: np.full(x.shape[:-1], v)
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "name":
            self.take()
            if value in FUNCTIONS:
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                fn = FUNCTIONS[value]
                return lambda x: fn(arg(x))
            if value in CONSTANTS:
                c = CONSTANTS[value]
                return lambda x: np.full(x.shape[:-1], c)
            m = re.fullmatch(r"x(\d+)", value)
            if m:
                k = int(m.group(1))
                if k < 1 or (self.dimension is not None and k > self.dimension):
                    raise ExpressionError(f"variable {value} out of range")
                self.max_var = max(self.max_var, k)
                return lambda x, j=k - 1: x[..., j]
            raise ExpressionError(f"unknown name {value!r}")
        raise ExpressionError(f"unexpected token {value!r}")


def _binary(op, left, right):
    fn = BINARY[op]
    return lambda x: fn(left(x), right(x))


class Expression:
    """Compiled expression; call with points of shape ``(..., d)``."""

    def __init__(self, text: str, dimension: int | None = None):
        self.text = text
        parser = _Parser(tokenize(text), dimension)
        self._fn = parser.parse()
        self.dimension = dimension if dimension is not None else parser.max_var

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(self._fn(x), dtype=float)

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse_inequality(text: str, dimension: int | None = None):
    """Parse ``lhs <= rhs`` or ``lhs >= rhs`` into a predicate over points."""
    for sym, flip in (("<=", False), (">=", True)):
        if sym in text:
            lhs, rhs = text.split(sym, 1)
            lo, hi = Expression(lhs, dimension), Expression(rhs, dimension)
            if flip:
                lo, hi = hi, lo
            return lambda x: lo(x) <= hi(x)
    raise ExpressionError(f"constraint {text!r} needs '<=' or '>='")
