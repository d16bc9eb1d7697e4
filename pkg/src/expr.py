# -*- coding: utf-8 -*-
"""
Weight expression language
==========================

A small recursive-descent parser for weight expressions such as

    1-r^2
    (1-r^2)^0.5
    exp(-x1)            (not allowed: there is no unary minus; write 0-x1)
    max(1-r, 0.1)

Grammar (EBNF):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" number)?
    base   := number | "r" | "x" index | func "(" expr ("," expr)? ")" | "(" expr ")"
    func   := abs | sqrt | exp | log | min | max

'r' is the Euclidean norm of the evaluation point and x1..xm its coordinates.
The exponent after '^' must be a literal; a leading '-' is accepted there.
Error offsets are UTF-8 byte offsets into the source text.

Evaluation is vectorised over point arrays of shape (..., m).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import (
    CoordinateIndexError,
    ExpressionSyntaxError,
    ParameterError,
    UnknownIdentifierError,
    WeightDomainError,
)

FUNCTIONS = {'abs': 1, 'sqrt': 1, 'exp': 1, 'log': 1, 'min': 2, 'max': 2}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),−])
""", re.VERBOSE)


@dataclass(frozen=True)
class Num(object):
    value: float


@dataclass(frozen=True)
class Radius(object):
    pass


@dataclass(frozen=True)
class Coord(object):
    index: int


@dataclass(frozen=True)
class BinOp(object):
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow(object):
    base: object
    exponent: float


@dataclass(frozen=True)
class Call(object):
    name: str
    args: Tuple


@dataclass(frozen=True)
class Token(object):
    kind: str
    text: str
    offset: int


def _byte_offset(text, index):
    return len(text[:index].encode('utf-8'))


def tokenize(text):
    """Split `text` into tokens; offsets are byte offsets."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError("unexpected character %r" % text[pos],
                                        _byte_offset(text, pos), text)
        kind = m.lastgroup
        if kind != 'ws':
            tok = m.group(kind)
            if tok == '−':
                tok = '-'
            tokens.append(Token(kind, tok, _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(Token('end', '', _byte_offset(text, len(text))))
    return tokens


class _Parser(object):

    def __init__(self, text, dimension):
        self.text = text
        self.dimension = int(dimension)
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.take()
        if tok.text != text:
            found = repr(tok.text) if tok.kind != 'end' else 'end of input'
            raise ExpressionSyntaxError("expected %r, found %s" % (text, found),
                                        tok.offset, self.text)
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != 'end':
            raise ExpressionSyntaxError("unexpected %r" % tok.text, tok.offset, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ('+', '-'):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().text in ('*', '/'):
            op = self.take().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek().text == '^':
            self.take()
            sign = 1.0
            if self.peek().text == '-':
                self.take()
                sign = -1.0
            tok = self.take()
            if tok.kind != 'number':
                raise ExpressionSyntaxError("'^' requires a literal exponent",
                                            tok.offset, self.text)
            node = Pow(node, sign * self._number(tok))
        return node

    def _number(self, tok):
        value = float(tok.text)
        if not math.isfinite(value):
            raise ExpressionSyntaxError("literal %r overflows" % tok.text, tok.offset, self.text)
        return value

    def base(self):
        tok = self.take()
        if tok.kind == 'number':
            return Num(self._number(tok))
        if tok.text == '(':
            node = self.expr()
            self.expect(')')
            return node
        if tok.kind == 'ident':
            name = tok.text
            if name == 'r':
                return Radius()
            if name in FUNCTIONS:
                self.expect('(')
                args = [self.expr()]
                if self.peek().text == ',':
                    self.take()
                    args.append(self.expr())
                close = self.expect(')')
                if len(args) != FUNCTIONS[name]:
                    raise ExpressionSyntaxError(
                        "%s takes %d argument(s), got %d" % (name, FUNCTIONS[name], len(args)),
                        close.offset, self.text)
                return Call(name, tuple(args))
            m = re.fullmatch(r'x(\d+)', name)
            if m:
                index = int(m.group(1))
                if index < 1 or index > self.dimension:
                    raise CoordinateIndexError(
                        "coordinate x%d outside dimension %d" % (index, self.dimension),
                        tok.offset, self.text)
                return Coord(index)
            raise UnknownIdentifierError(name, tok.offset, self.text)
        found = repr(tok.text) if tok.kind != 'end' else 'end of input'
        raise ExpressionSyntaxError("unexpected %s" % found, tok.offset, self.text)


def parse_weight(text, dimension):
    """
    Parse a weight expression.

    Parameters
    ----------
    text : str
        Expression source, nonempty.
    dimension : int
        Dimension m of the evaluation points; bounds the coordinate index.

    Returns
    -------
    expression tree (Num | Radius | Coord | BinOp | Pow | Call)

    Raises
    ------
    ExpressionSyntaxError, UnknownIdentifierError, CoordinateIndexError
    """
    if int(dimension) < 1:
        raise ParameterError("dimension must be >= 1")
    if text is None or not str(text).strip():
        raise ExpressionSyntaxError("empty expression", 0, text)
    return _Parser(str(text), dimension).parse()


def to_text(node):
    """Pretty-print a tree; parse(to_text(t)) reproduces t."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Radius):
        return 'r'
    if isinstance(node, Coord):
        return 'x%d' % node.index
    if isinstance(node, BinOp):
        return '(%s %s %s)' % (to_text(node.left), node.op, to_text(node.right))
    if isinstance(node, Pow):
        base = to_text(node.base)
        if isinstance(node.base, Pow):
            base = '(%s)' % base
        return '%s^%s' % (base, repr(float(node.exponent)))
    if isinstance(node, Call):
        return '%s(%s)' % (node.name, ', '.join(to_text(a) for a in node.args))
    raise TypeError("not an expression node: %r" % (node,))


def max_coordinate(node):
    """Largest coordinate index used in the tree (0 if none)."""
    if isinstance(node, Coord):
        return node.index
    if isinstance(node, BinOp):
        return max(max_coordinate(node.left), max_coordinate(node.right))
    if isinstance(node, Pow):
        return max_coordinate(node.base)
    if isinstance(node, Call):
        return max(max_coordinate(a) for a in node.args)
    return 0


def evaluate(node, points, strict=True):
    """
    Evaluate a tree at points of shape (..., m).

    With strict=False, invalid operations yield nan/inf instead of raising;
    the geodesic optimizer uses this for trial paths.

    Raises
    ------
    WeightDomainError
        log of a nonpositive value, sqrt of a negative value, division by
        zero, or a fractional power of a negative value.
    """
    pts = np.asarray(points, dtype=float)
    if strict:
        return np.asarray(_eval(node, pts, True), dtype=float)
    with np.errstate(all='ignore'):
        return np.asarray(_eval(node, pts, False), dtype=float)


def _fail(strict, message):
    if strict:
        raise WeightDomainError(message)


def _eval(node, pts, strict):
    shape = pts.shape[:-1]
    if isinstance(node, Num):
        return np.full(shape, node.value)
    if isinstance(node, Radius):
        return np.linalg.norm(pts, axis=-1)
    if isinstance(node, Coord):
        return pts[..., node.index - 1]
    if isinstance(node, BinOp):
        a = _eval(node.left, pts, strict)
        b = _eval(node.right, pts, strict)
        if node.op == '+':
            return a + b
        if node.op == '-':
            return a - b
        if node.op == '*':
            return a * b
        if np.any(b == 0.0):
            _fail(strict, "division by zero")
        return a / b
    if isinstance(node, Pow):
        a = _eval(node.base, pts, strict)
        p = node.exponent
        if p != math.floor(p) and np.any(a < 0.0):
            _fail(strict, "fractional power of a negative value")
        if p < 0.0 and np.any(a == 0.0):
            _fail(strict, "negative power of zero")
        return np.power(a, p)
    if isinstance(node, Call):
        args = [_eval(a, pts, strict) for a in node.args]
        name = node.name
        if name == 'abs':
            return np.abs(args[0])
        if name == 'sqrt':
            if np.any(args[0] < 0.0):
                _fail(strict, "sqrt of a negative value")
            return np.sqrt(args[0])
        if name == 'exp':
            with np.errstate(over='ignore'):
                return np.exp(args[0])
        if name == 'log':
            if np.any(args[0] <= 0.0):
                _fail(strict, "log of a nonpositive value")
            return np.log(args[0])
        if name == 'min':
            return np.minimum(args[0], args[1])
        return np.maximum(args[0], args[1])
    raise TypeError("not an expression node: %r" % (node,))
