"""A tiny language for Hermitian metrics on one chart.

Grammar::

    # comment
    dim 2
    g[1,1] = 4/abs2(z_1, z_2)
    g[1,2] = (0.5-0.25j)*zb_1*z_2

Entries are ``g[i,j] = g_{i jbar}`` for ``1 <= i <= j <= n``; unset entries
default to ``delta_ij`` and the lower triangle is the conjugate swap of the
upper one.  Expressions use ``z_k`` and ``zb_k`` (independent symbols, bound
to ``z_k`` and ``conj(z_k)`` at evaluation), numeric literals with an
optional ``j`` suffix for imaginary parts, the constant ``i``, the binary
operators ``+ - * /``, integer powers ``^``, and the functions ``exp``,
``log`` (positive real argument) and ``abs2(v1, ..., vk) = sum v conj(v)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DimensionError, DslEvaluationError, DslSyntaxError, NonHermitianEntry
from .jets import Jet, MetricField, jet_conj, jet_exp, jet_log, taylor_metric_jet

FUNCTIONS = {"exp": 1, "log": 1, "abs2": None}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),\[\]=])
    """,
    re.VERBOSE,
)
_VAR = re.compile(r"^(zb|z)_(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    line: int
    col: int


@dataclass(frozen=True)
class Num(Node):
    value: complex


@dataclass(frozen=True)
class Var(Node):
    conjugate: bool
    index: int  # 0-based


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple


@dataclass(frozen=True)
class MetricExpression:
    """Parsed metric: upper-triangle ASTs keyed by 0-based ``(i, j)``."""

    n: int
    entries: dict = field(default_factory=dict)
    source: str = ""


def tokenize_line(text: str, line: int) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list, line: int, n: int, end_col: int):
        self.toks = tokens
        self.k = 0
        self.line = line
        self.n = n
        self.end_col = end_col

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok if tok is not None else self.peek()
        col = tok.col if tok is not None else self.end_col
        raise DslSyntaxError(msg, self.line, col)

    def take(self, text=None, kind=None):
        tok = self.peek()
        if tok is None:
            self.error(f"expected {text or kind}, found end of line")
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            self.error(f"expected {text or kind}, found {tok.text!r}")
        self.k += 1
        return tok

    def at(self, *texts):
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in texts

    def expr(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.take()
            node = BinOp(op.line, op.col, op.text, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*", "/"):
            op = self.take()
            node = BinOp(op.line, op.col, op.text, node, self.unary())
        return node

    def unary(self):
        if self.at("-", "+"):
            op = self.take()
            arg = self.unary()
            return Neg(op.line, op.col, arg) if op.text == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            op = self.take()
            base = Pow(op.line, op.col, base, self.exponent())
            if self.at("^"):
                self.error("chained powers need parentheses")
        return base

    def exponent(self):
        paren = self.at("(")
        if paren:
            self.take("(")
        sign = 1
        if self.at("-"):
            self.take("-")
            sign = -1
        tok = self.take(kind="number")
        if not tok.text.isdigit():
            self.error("exponent must be an integer", tok)
        if paren:
            self.take(")")
        return sign * int(tok.text)

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.error("expected an expression, found end of line")
        if tok.kind == "number":
            self.k += 1
            text = tok.text
            value = complex(0, float(text[:-1])) if text.endswith("j") else complex(float(text))
            return Num(tok.line, tok.col, value)
        if tok.kind == "ident":
            self.k += 1
            if tok.text == "i":
                return Num(tok.line, tok.col, 1j)
            if tok.text in FUNCTIONS:
                return self.call(tok)
            m = _VAR.match(tok.text)
            if m is None:
                self.error(f"unknown name {tok.text!r}", tok)
            idx = int(m.group(2))
            if not 1 <= idx <= self.n:
                raise DimensionError(f"variable {tok.text} out of range for dim {self.n}", tok.line, tok.col)
            return Var(tok.line, tok.col, m.group(1) == "zb", idx - 1)
        if self.at("("):
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        self.error(f"unexpected {tok.text!r}")

    def call(self, name_tok):
        self.take("(")
        args = [self.expr()]
        while self.at(","):
            self.take(",")
            args.append(self.expr())
        self.take(")")
        arity = FUNCTIONS[name_tok.text]
        if arity is not None and len(args) != arity:
            self.error(f"{name_tok.text} takes {arity} argument(s)", name_tok)
        return Call(name_tok.line, name_tok.col, name_tok.text, tuple(args))


def _strip_comment(text: str) -> str:
    return text.split("#", 1)[0]


def parse_metric(source: str) -> MetricExpression:
    """Parse metric source text into a MetricExpression."""
    n = None
    entries: dict = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        text = _strip_comment(raw)
        if not text.strip():
            continue
        toks = tokenize_line(text, lineno)
        end_col = len(text.rstrip()) + 1
        if n is None:
            if len(toks) != 2 or toks[0].text != "dim" or toks[1].kind != "number":
                raise DslSyntaxError("expected header 'dim n'", lineno, toks[0].col)
            if not toks[1].text.isdigit() or int(toks[1].text) < 1:
                raise DimensionError("dimension must be a positive integer", lineno, toks[1].col)
            n = int(toks[1].text)
            continue
        p = _Parser(toks, lineno, n, end_col)
        head = p.take(kind="ident")
        if head.text != "g":
            p.error(f"expected 'g[i,j] = ...', found {head.text!r}", head)
        p.take("[")
        ti = p.take(kind="number")
        p.take(",")
        tj = p.take(kind="number")
        p.take("]")
        p.take("=")
        for tok in (ti, tj):
            if not tok.text.isdigit():
                p.error("entry indices must be integers", tok)
        i, j = int(ti.text), int(tj.text)
        if not (1 <= i <= n and 1 <= j <= n):
            raise DimensionError(f"entry g[{i},{j}] out of range for dim {n}", lineno, ti.col)
        if i > j:
            raise DimensionError(
                f"entry g[{i},{j}] is below the diagonal; give g[{j},{i}] instead", lineno, ti.col
            )
        if (i - 1, j - 1) in entries:
            raise DslSyntaxError(f"duplicate entry g[{i},{j}]", lineno, head.col)
        node = p.expr()
        if p.peek() is not None:
            p.error(f"unexpected {p.peek().text!r}")
        entries[(i - 1, j - 1)] = node
    if n is None:
        raise DslSyntaxError("missing header 'dim n'", 1, 1)
    return MetricExpression(n, entries, source)


def parse_metric_file(path) -> MetricExpression:
    return parse_metric(Path(path).read_text(encoding="utf-8"))


# -- evaluation ---------------------------------------------------------------


def _value(x) -> complex:
    return x.value if isinstance(x, Jet) else complex(x)


def evaluate(node: Node, z, zb):
    """Evaluate an AST over jets or plain complex numbers."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return zb[node.index] if node.conjugate else z[node.index]
    if isinstance(node, Neg):
        return -evaluate(node.arg, z, zb)
    if isinstance(node, BinOp):
        a = evaluate(node.left, z, zb)
        b = evaluate(node.right, z, zb)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if _value(b) == 0:
            raise DslEvaluationError("division by zero", node.line, node.col)
        return a / b
    if isinstance(node, Pow):
        a = evaluate(node.base, z, zb)
        if node.exponent < 0 and _value(a) == 0:
            raise DslEvaluationError("negative power of zero", node.line, node.col)
        return a**node.exponent
    if isinstance(node, Call):
        args = [evaluate(a, z, zb) for a in node.args]
        if node.name == "exp":
            return jet_exp(args[0])
        if node.name == "log":
            v = _value(args[0])
            if v.real <= 0 or abs(v.imag) > 1e-12 * abs(v):
                raise DslEvaluationError(f"log of non-positive value {v:.6g}", node.line, node.col)
            return jet_log(args[0])
        total = 0.0
        for a in args:
            total = total + a * jet_conj(a)
        return total
    raise TypeError(f"unknown node {node!r}")


_PROBES = (
    (0.37 + 0.21j, -0.52 + 0.13j, 0.18 - 0.44j, 0.29 + 0.61j, -0.33 - 0.27j, 0.47 + 0.09j),
    (1.13 - 0.71j, 0.64 + 0.95j, -0.82 + 0.36j, 0.55 - 0.58j, 0.91 + 0.22j, -0.26 + 0.74j),
)


def _check_diagonal(expr: MetricExpression) -> None:
    for probe in _PROBES:
        z = [complex(v) for v in probe[: expr.n]]
        if len(z) < expr.n:
            z += [0.3 + 0.2j * k for k in range(expr.n - len(z))]
        zb = [v.conjugate() for v in z]
        for (i, j), node in expr.entries.items():
            if i != j:
                continue
            try:
                v = complex(evaluate(node, z, zb))
            except (DslEvaluationError, ZeroDivisionError, OverflowError):
                continue
            if abs(v.imag) > 1e-10 * max(1.0, abs(v)):
                raise NonHermitianEntry(
                    f"diagonal entry g[{i + 1},{i + 1}] is not real (value {v:.6g})", node.line, node.col
                )


def expression_field(
    expr: MetricExpression, domain: Callable | None = None, name: str = "dsl"
) -> MetricField:
    """Wrap a parsed expression as a MetricField evaluated in jet arithmetic."""
    _check_diagonal(expr)
    entries = dict(expr.entries)

    def table(z, zb):
        return {key: evaluate(node, z, zb) for key, node in entries.items()}

    def evaluator(point: np.ndarray, order: int):
        return taylor_metric_jet(table, expr.n, point, order)

    kwargs = {} if domain is None else {"domain": domain}
    return MetricField(name=name, n=expr.n, evaluator=evaluator, analytic=False, dsl_source=expr.source, **kwargs)


def field_from_source(source: str, domain: Callable | None = None, name: str = "dsl") -> MetricField:
    return expression_field(parse_metric(source), domain, name)
