"""Scalar-field expressions over chart coordinates.

Grammar (whitespace insignificant)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INTEGER)?
    atom    := NUMBER | NAME | NAME '(' sum ')' | '(' sum ')'

so ``^`` binds tighter than unary minus, which binds tighter than ``*``
and ``/``. Exponents are integer literals only. Functions: exp, log, sin,
cos, sinh, cosh, sqrt.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from kenmotsu.jet import DomainError, Jet

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "sqrt")
MAX_ORDER = 3


class ExprSyntaxError(ValueError):
    """Malformed expression; ``offset`` is the 0-based byte offset of the fault."""

    def __init__(self, message: str, offset: int, source: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.source = source


class UnknownIdentifier(ValueError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


# --- tree -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Param, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class Expr:
    """Parsed expression together with the names it was checked against."""

    root: Node
    coords: tuple
    params: tuple
    source: str = ""

    def __str__(self):
        return _fmt(self.root)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.root, Num) and self.root.value == 0.0

    def free_params(self) -> set:
        out = set()
        _walk_params(self.root, out)
        return out


def _walk_params(node, out):
    if isinstance(node, Param):
        out.add(node.name)
    elif isinstance(node, Neg):
        _walk_params(node.arg, out)
    elif isinstance(node, BinOp):
        _walk_params(node.left, out)
        _walk_params(node.right, out)
    elif isinstance(node, Pow):
        _walk_params(node.base, out)
    elif isinstance(node, Call):
        _walk_params(node.arg, out)


def _fmt(node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Param)):
        return node.name
    if isinstance(node, Neg):
        return f"neg({_fmt(node.arg)})"
    if isinstance(node, BinOp):
        name = {"+": "add", "-": "sub", "*": "mul", "/": "div"}[node.op]
        return f"{name}({_fmt(node.left)}, {_fmt(node.right)})"
    if isinstance(node, Pow):
        return f"pow({_fmt(node.base)}, {node.exponent})"
    return f"{node.func}({_fmt(node.arg)})"


# --- lexer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r"|(?P<bad>\S))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int  # character position


def _tokenize(source: str):
    toks = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            break
        kind = m.lastgroup
        if kind is None:  # trailing whitespace
            break
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(source)))
    return toks


class _Parser:
    def __init__(self, source, coords, params):
        self.source = source
        self.coords = {name: i for i, name in enumerate(coords)}
        self.params = set(params)
        self.toks = _tokenize(source)
        self.k = 0

    def _offset(self, tok):
        return len(self.source[: tok.pos].encode("utf-8"))

    def error(self, message, tok):
        raise ExprSyntaxError(message, self._offset(tok), self.source)

    @property
    def tok(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text or t.kind != "op":
            what = repr(t.text) if t.kind != "end" else "end of input"
            self.error(f"expected {text!r}, found {what}", t)
        return self.take()

    def parse(self):
        node = self.sum()
        if self.tok.kind != "end":
            self.error(f"unexpected token {self.tok.text!r}", self.tok)
        return node

    def sum(self):
        node = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            node = BinOp(op, node, self.product())
        return node

    def product(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            sign = 1
            if self.tok.kind == "op" and self.tok.text == "-":
                self.take()
                sign = -1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.error("exponent must be an integer literal", t)
            self.take()
            if self.tok.kind == "op" and self.tok.text == "^":
                self.error("chained exponents are not supported", self.tok)
            return Pow(base, sign * int(t.text))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(float(t.text))
        if t.kind == "name":
            self.take()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise UnknownIdentifier(t.text, self._offset(t))
                self.take()
                arg = self.sum()
                self.expect(")")
                return Call(t.text, arg)
            if t.text in FUNCTIONS and t.text not in self.coords and t.text not in self.params:
                self.error(f"expected '(' after {t.text}", self.tok)
            if t.text in self.coords:
                return Var(t.text, self.coords[t.text])
            if t.text in self.params:
                return Param(t.text)
            raise UnknownIdentifier(t.text, self._offset(t))
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.sum()
            self.expect(")")
            return node
        if t.kind == "end":
            self.error("unexpected end of input", t)
        self.error(f"unexpected token {t.text!r}", t)


@functools.lru_cache(maxsize=4096)
def _parse_cached(source: str, coords: tuple, params: tuple) -> Expr:
    clash = (set(coords) | set(params)) & set(FUNCTIONS)
    if clash:
        raise ValueError(f"names shadow builtin functions: {sorted(clash)}")
    if not source.strip():
        raise ExprSyntaxError("empty expression", 0, source)
    root = _Parser(source, coords, params).parse()
    return Expr(root, coords, params, source)


def parse(source, coords: Sequence[str], params: Sequence[str] = ()) -> Expr:
    """Parse ``source`` against the declared coordinate and parameter names."""
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        source = repr(float(source))
    if not isinstance(source, str):
        raise TypeError(f"expression must be text, got {type(source).__name__}")
    return _parse_cached(source, tuple(coords), tuple(params))


# --- evaluation -------------------------------------------------------------


def _eval(node, point, params, dim, order):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return Jet.variable(node.index, point[node.index], dim, order)
    if isinstance(node, Param):
        return params[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, point, params, dim, order)
    if isinstance(node, BinOp):
        a = _eval(node.left, point, params, dim, order)
        b = _eval(node.right, point, params, dim, order)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if isinstance(b, Jet) or isinstance(a, Jet):
            return a / b
        if b == 0:
            raise DomainError("division by zero")
        return a / b
    if isinstance(node, Pow):
        a = _eval(node.base, point, params, dim, order)
        if isinstance(a, Jet):
            return a.powi(node.exponent)
        if a == 0 and node.exponent < 0:
            raise DomainError("negative power of zero")
        return float(a) ** node.exponent
    a = _eval(node.arg, point, params, dim, order)
    if isinstance(a, Jet):
        return getattr(a, node.func)()
    return _scalar_call(node.func, a)


def _scalar_call(func, a):
    if func in ("log", "sqrt") and a <= 0:
        raise DomainError(f"{func} of a non-positive value")
    return float(getattr(math, func)(a))


def eval_jet(e: Expr, point, param_values: Mapping[str, float] | None = None, order: int = 0) -> Jet:
    """Taylor jet of ``e`` at ``point`` up to ``order`` (0..3)."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    dim = len(e.coords)
    point = tuple(float(x) for x in point)
    if len(point) != dim:
        raise ValueError(f"point has {len(point)} coordinates, chart has {dim}")
    param_values = dict(param_values or {})
    missing = e.free_params() - set(param_values)
    if missing:
        raise ValueError(f"unbound parameters: {sorted(missing)}")
    out = _eval(e.root, point, {k: float(v) for k, v in param_values.items()}, dim, order)
    if isinstance(out, Jet):
        return out
    return Jet.constant(out, dim, order)


def evaluate(e: Expr, point, param_values: Mapping[str, float] | None = None) -> float:
    return eval_jet(e, point, param_values, 0).value
