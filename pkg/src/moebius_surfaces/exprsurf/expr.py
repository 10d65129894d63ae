"""A tiny expression language in the variables u and v.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'pi' | 'u' | 'v' | FUNC '(' expr ')' | '(' expr ')'

FUNC is one of sin cos sinh cosh tanh exp log sqrt.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCS = {
    "sin": np.sin, "cos": np.cos, "sinh": np.sinh, "cosh": np.cosh,
    "tanh": np.tanh, "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
}
CONSTS = {"pi": math.pi}
VARIABLES = ("u", "v")


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class ExprDomainError(ValueError):
    """Raised when an expression leaves its domain (log(-1), 1/0, ...)."""


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or a FUNCS key
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Unary, Binary]

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\S))")


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        num, name, sym = m.groups()
        start = m.start(m.lastindex)
        col = col0 + start
        if num is not None:
            tokens.append(("num", num, col))
        elif name is not None:
            tokens.append(("name", name, col))
        else:
            if sym not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {sym!r}", line, col)
            tokens.append(("sym", sym, col))
        pos = m.end()
    tokens.append(("end", "", col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, line: int, col0: int):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, self.line, tok[2])

    def expect(self, sym):
        tok = self.take()
        if tok[0] != "sym" or tok[1] != sym:
            self.fail(f"expected {sym!r}", tok)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[:2] in (("sym", "*"), ("sym", "/")):
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("sym", "-"):
            self.take()
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("sym", "^"):
            self.take()
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            if text in CONSTS:
                return Const(CONSTS[text])
            if text in VARIABLES:
                return Var(text)
            self.fail(f"unknown variable {text}", tok)
        if tok[:2] == ("sym", "("):
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            self.fail("unexpected end of expression", tok)
        self.fail(f"unexpected token {text!r}", tok)


def parse_expr(text: str, line: int = 1, column: int = 1) -> Expr:
    """Parse ``text``; error positions are reported relative to (line, column)."""
    return _Parser(text, line, column).parse()


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.arg)})"
        return f"{e.op}({to_text(e.arg)})"
    return f"({to_text(e.left)} {e.op} {to_text(e.right)})"


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Unary):
        return variables(e.arg)
    if isinstance(e, Binary):
        return variables(e.left) | variables(e.right)
    return set()


def _eval(e: Expr, u, v):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return u if e.name == "u" else v
    if isinstance(e, Unary):
        a = _eval(e.arg, u, v)
        return -a if e.op == "neg" else FUNCS[e.op](a)
    a, b = _eval(e.left, u, v), _eval(e.right, u, v)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        return a / b
    return np.power(a, b)


def evaluate_expr(e: Expr, u, v) -> np.ndarray:
    """Vectorized evaluation; non-finite results raise ExprDomainError."""
    dtype = np.result_type(np.asarray(u).dtype, np.asarray(v).dtype, float)
    u = np.asarray(u, dtype=dtype)
    v = np.asarray(v, dtype=dtype)
    with np.errstate(all="ignore"):
        out = np.asarray(_eval(e, u, v), dtype=dtype) * np.ones(np.broadcast(u, v).shape, dtype=dtype)
    bad = ~np.isfinite(out)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        uu = np.broadcast_to(u, out.shape)[tuple(idx)]
        vv = np.broadcast_to(v, out.shape)[tuple(idx)]
        raise ExprDomainError(
            f"expression {to_text(e)} is undefined at (u, v) = ({uu:.6g}, {vv:.6g})")
    return out
