"""Small arithmetic-expression language for user-defined metric entries.

Grammar (tightest first): ^  >  unary -  >  * /  >  + -, with parentheses
and function application f(expr).  Expressions are evaluated over floats or
over dual numbers, which carry exact first derivatives through every node.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, UnknownSymbol

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt")


class Dual:
    """value + first-order perturbations (one slot per variable)."""

    __slots__ = ("val", "eps")

    def __init__(self, val, eps):
        self.val = val
        self.eps = np.asarray(eps, dtype=float)

    @classmethod
    def variable(cls, val, index, n_vars):
        eps = np.zeros(n_vars)
        eps[index] = 1.0
        return cls(val, eps)

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val + o.val, self.eps + o.eps)
        return Dual(self.val + o, self.eps)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val - o.val, self.eps - o.eps)
        return Dual(self.val - o, self.eps)

    def __rsub__(self, o):
        return Dual(o - self.val, -self.eps)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val * o.val, self.val * o.eps + o.val * self.eps)
        return Dual(self.val * o, self.eps * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            inv = 1.0 / o.val
            return Dual(self.val * inv, (self.eps - self.val * inv * o.eps) * inv)
        return Dual(self.val / o, self.eps / o)

    def __rtruediv__(self, o):
        inv = 1.0 / self.val
        return Dual(o * inv, -o * inv * inv * self.eps)

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __pow__(self, o):
        if isinstance(o, Dual):
            v = self.val ** o.val
            return Dual(
                v,
                v * (o.eps * math.log(self.val) + o.val / self.val * self.eps),
            )
        if o == 0:
            return Dual(1.0, np.zeros_like(self.eps))
        return Dual(self.val ** o, o * self.val ** (o - 1) * self.eps)

    def __rpow__(self, o):
        v = o ** self.val
        return Dual(v, v * math.log(o) * self.eps)


_DUAL_FUNCS = {
    "sin": lambda d: Dual(math.sin(d.val), math.cos(d.val) * d.eps),
    "cos": lambda d: Dual(math.cos(d.val), -math.sin(d.val) * d.eps),
    "sinh": lambda d: Dual(math.sinh(d.val), math.cosh(d.val) * d.eps),
    "cosh": lambda d: Dual(math.cosh(d.val), math.sinh(d.val) * d.eps),
    "exp": lambda d: Dual(math.exp(d.val), math.exp(d.val) * d.eps),
    "log": lambda d: Dual(math.log(d.val), d.eps / d.val),
    "sqrt": lambda d: Dual(math.sqrt(d.val), d.eps / (2.0 * math.sqrt(d.val))),
}

_FLOAT_FUNCS = {name: getattr(math, name) for name in FUNCTIONS}


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Num(Node):
    value: float

    def eval(self, values):
        return self.value


@dataclass(frozen=True)
class Var(Node):
    index: int
    name: str

    def eval(self, values):
        return values[self.index]


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def eval(self, values):
        return -self.arg.eval(values)


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def eval(self, values):
        a = self.left.eval(values)
        b = self.right.eval(values)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return a / b
        return a ** b


@dataclass(frozen=True)
class Call(Node):
    fn: str
    arg: Node

    def eval(self, values):
        v = self.arg.eval(values)
        if isinstance(v, Dual):
            return _DUAL_FUNCS[self.fn](v)
        return _FLOAT_FUNCS[self.fn](v)


@dataclass(frozen=True)
class ExpressionAst:
    """Parsed expression plus its source and variable names."""

    root: Node
    source: str
    variables: tuple

    def __call__(self, values):
        return self.root.eval(values)

    def evaluate(self, point):
        return float(self.root.eval([float(v) for v in point]))

    def gradient(self, point):
        """Exact first derivatives at `point` via dual numbers."""
        n = len(self.variables)
        duals = [Dual.variable(float(v), i, n) for i, v in enumerate(point)]
        out = self.root.eval(duals)
        if isinstance(out, Dual):
            return out.eps.copy()
        return np.zeros(n)

    def value_and_gradient(self, point):
        n = len(self.variables)
        duals = [Dual.variable(float(v), i, n) for i, v in enumerate(point)]
        out = self.root.eval(duals)
        if isinstance(out, Dual):
            return out.val, out.eps.copy()
        return float(out), np.zeros(n)


class _Tokenizer:
    def __init__(self, src):
        self.src = src
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""


class _Parser:
    def __init__(self, src, variables):
        self.t = _Tokenizer(src)
        self.variables = list(variables)

    def parse(self):
        node = self.sum()
        self.t.skip_ws()
        if self.t.pos != len(self.t.src):
            raise ParseError(
                f"unexpected character '{self.t.src[self.t.pos]}'", self.t.pos
            )
        return node

    def sum(self):
        node = self.term()
        while self.t.peek() in ("+", "-"):
            op = self.t.src[self.t.pos]
            self.t.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.t.peek() in ("*", "/"):
            op = self.t.src[self.t.pos]
            self.t.pos += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.t.peek() == "-":
            self.t.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.t.peek() == "^":
            self.t.pos += 1
            if self.t.peek() == "-":
                self.t.pos += 1
                return BinOp("^", base, Neg(self.power()))
            return BinOp("^", base, self.power())
        return base

    def atom(self):
        ch = self.t.peek()
        pos = self.t.pos
        if ch == "":
            raise ParseError("unexpected end of input", pos)
        if ch == "(":
            self.t.pos += 1
            node = self.sum()
            if self.t.peek() != ")":
                raise ParseError("expected ')'", self.t.pos)
            self.t.pos += 1
            return node
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch.isalpha() or ch == "_":
            return self.identifier()
        raise ParseError(f"unexpected character '{ch}'", pos)

    def number(self):
        start = self.t.pos
        src = self.t.src
        while self.t.pos < len(src) and (src[self.t.pos].isdigit() or src[self.t.pos] == "."):
            self.t.pos += 1
        if self.t.pos < len(src) and src[self.t.pos] in "eE":
            mark = self.t.pos
            self.t.pos += 1
            if self.t.pos < len(src) and src[self.t.pos] in "+-":
                self.t.pos += 1
            if self.t.pos < len(src) and src[self.t.pos].isdigit():
                while self.t.pos < len(src) and src[self.t.pos].isdigit():
                    self.t.pos += 1
            else:
                self.t.pos = mark
        try:
            return Num(float(src[start:self.t.pos]))
        except ValueError:
            raise ParseError("malformed number", start) from None

    def identifier(self):
        start = self.t.pos
        src = self.t.src
        while self.t.pos < len(src) and (src[self.t.pos].isalnum() or src[self.t.pos] == "_"):
            self.t.pos += 1
        name = src[start:self.t.pos]
        if name in FUNCTIONS:
            if self.t.peek() != "(":
                raise ParseError(f"function '{name}' needs an argument", self.t.pos)
            self.t.pos += 1
            arg = self.sum()
            if self.t.peek() != ")":
                raise ParseError("expected ')'", self.t.pos)
            self.t.pos += 1
            return Call(name, arg)
        if name == "pi":
            return Num(math.pi)
        if name in self.variables:
            return Var(self.variables.index(name), name)
        raise UnknownSymbol(name, start)


def parse_expression(src, variables):
    """Parse `src` over the given variable names into an ExpressionAst."""
    root = _Parser(src, variables).parse()
    return ExpressionAst(root, src, tuple(variables))
