"""A small expression language for complex potentials of a real variable ``x``.

Grammar (EBNF)::

    expr    = term , { ( "+" | "-" ) , term } ;
    term    = unary , { ( "*" | "/" ) , unary } ;
    unary   = ( "-" | "+" ) , unary | power ;
    power   = primary , [ "^" , unary ] ;          (* right associative *)
    primary = number | name | name , "(" , expr , ")" | "(" , expr , ")" ;
    number  = digits , [ "." , [ digits ] ] , [ exponent ]
            | "." , digits , [ exponent ] ;
    exponent= ( "e" | "E" ) , [ "+" | "-" ] , digits ;
    name    = letter , { letter | digit | "_" } ;

``x`` is the coordinate, ``i`` and ``pi`` are constants, the callable names are
exp, ln, sin, cos, sinh, cosh, tanh, coth, sqrt and abs; every other name is a
parameter bound at evaluation time. Precedence is ``^`` over unary minus over
``* /`` over ``+ -``, so ``-x^2`` is ``-(x^2)`` and ``2^-1`` is allowed.

Branches are principal; ``a^b`` is ``exp(b ln a)`` (exact repeated
multiplication for small integer ``b``). Signed zeros are normalized before
ln, sqrt and ``^`` so the cut is approached from above.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import (EvaluationPole, ExprSyntaxError, UnboundParameter,
                     UnknownFunction, UnknownIdentifier)

FUNCTIONS = ("exp", "ln", "sin", "cos", "sinh", "cosh", "tanh", "coth", "sqrt", "abs")
CONSTANTS = ("i", "pi")
POLE_EPS = 1e-300
_MAX_INT_POW = 64


# ---------------------------------------------------------------- AST nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


Node = Num | Var | Const | Param | Neg | Call | BinOp


def parameters(node: Node) -> frozenset[str]:
    """Names of the free parameters in ``node``."""
    if isinstance(node, Param):
        return frozenset((node.name,))
    if isinstance(node, Neg):
        return parameters(node.operand)
    if isinstance(node, Call):
        return parameters(node.arg)
    if isinstance(node, BinOp):
        return parameters(node.left) | parameters(node.right)
    return frozenset()


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)

_START = frozenset(("number", "name", "'('", "'-'", "'+'"))


@dataclass(frozen=True)
class _Tok:
    kind: str   # num, name, op, end
    text: str
    offset: int


def _tokenize(src: str) -> list[_Tok]:
    data = src.encode("utf-8")
    toks = []
    pos = 0
    # byte offsets: work on the decoded text but track utf-8 length
    bpos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", bpos, _START | {"operator"})
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, text, bpos))
        bpos += len(text.encode("utf-8"))
        pos = m.end()
    toks.append(_Tok("end", "", len(data)))
    return toks


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, src: str, allowed: frozenset[str] | None):
        self.toks = _tokenize(src)
        self.i = 0
        self.allowed = allowed

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def is_op(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def expect(self, text: str, expected) -> _Tok:
        t = self.peek()
        if t.kind == "op" and t.text == text:
            return self.take()
        raise ExprSyntaxError(f"unexpected {_describe(t)}", t.offset, expected)

    def parse(self) -> Node:
        node = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ExprSyntaxError(f"unexpected {_describe(t)}", t.offset,
                                  {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.is_op("+") or self.is_op("-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.is_op("*") or self.is_op("/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.is_op("-"):
            self.take()
            return Neg(self.unary())
        if self.is_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.is_op("^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Node:
        t = self.peek()
        if t.kind == "num":
            self.take()
            return Num(float(t.text))
        if t.kind == "name":
            self.take()
            if self.is_op("("):
                if t.text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {t.text!r}", t.offset,
                                          {f"'{f}'" for f in FUNCTIONS})
                self.take()
                arg = self.expr()
                self.expect(")", {"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
                return Call(t.text, arg)
            if t.text in FUNCTIONS:
                raise ExprSyntaxError(f"function {t.text!r} needs an argument",
                                      self.peek().offset, {"'('"})
            if t.text == "x":
                return Var()
            if t.text in CONSTANTS:
                return Const(t.text)
            if self.allowed is not None and t.text not in self.allowed:
                raise UnknownIdentifier(f"unknown identifier {t.text!r}", t.offset,
                                        {"x", *CONSTANTS, *self.allowed})
            return Param(t.text)
        if self.is_op("("):
            self.take()
            node = self.expr()
            self.expect(")", {"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
            return node
        raise ExprSyntaxError(f"unexpected {_describe(t)}", t.offset, _START)


def _describe(t: _Tok) -> str:
    return "end of input" if t.kind == "end" else repr(t.text)


def parse(source: str, params: set[str] | frozenset[str] | None = None) -> Node:
    """Parse ``source`` into an AST.

    If ``params`` is given, names outside it (and outside x, i, pi) raise
    :class:`UnknownIdentifier`; otherwise any name is a free parameter.
    """
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, _START)
    return _Parser(source, frozenset(params) if params is not None else None).parse()


# ---------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def to_source(node: Node) -> str:
    """Print an AST with the minimal parentheses that parse back to it."""
    if isinstance(node, Num):
        if not (math.isfinite(node.value) and node.value >= 0.0) or math.copysign(1.0, node.value) < 0:
            raise ValueError("literals must be finite and non-negative; use Neg")
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, (Const, Param)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    if isinstance(node, Neg):
        inner = to_source(node.operand)
        # operand of unary minus is parsed at unary level: power or another Neg
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return "-" + inner
    p = _PREC[node.op]
    left, right = to_source(node.left), to_source(node.right)
    if node.op == "^":
        # base must be a primary; exponent is a unary (so Neg or power is fine)
        if _prec(node.left) < _PREC["atom"]:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    return f"{left}{node.op}{right}"


# ---------------------------------------------------------------- scalar evaluation

def _check_den(z: complex, what: str) -> None:
    if abs(z) < POLE_EPS:
        raise EvaluationPole(f"{what} denominator vanishes")


def _norm0(z: complex) -> complex:
    return complex(z) + 0.0


def _pow(a: complex, b: complex) -> complex:
    a = _norm0(a)
    if b.imag == 0.0 and b.real == int(b.real) and abs(b.real) <= _MAX_INT_POW:
        n = int(b.real)
        if n < 0:
            _check_den(a, "power")
            return 1.0 / (a ** (-n)) if n != 0 else 1.0 + 0j
        return a ** n if n else 1.0 + 0j
    if a == 0:
        if b.real > 0:
            return 0j
        raise EvaluationPole("0 raised to a non-positive power")
    return cmath.exp(b * cmath.log(a))


def _coth(z: complex) -> complex:
    s = cmath.sinh(z)
    _check_den(s, "coth")
    return cmath.cosh(z) / s


def _ln(z: complex) -> complex:
    z = _norm0(z)
    if z == 0:
        raise EvaluationPole("ln(0)")
    return cmath.log(z)


_SCALAR_FN: dict[str, Callable[[complex], complex]] = {
    "exp": cmath.exp, "ln": _ln, "sin": cmath.sin, "cos": cmath.cos,
    "sinh": cmath.sinh, "cosh": cmath.cosh, "tanh": cmath.tanh, "coth": _coth,
    "sqrt": lambda z: cmath.sqrt(_norm0(z)), "abs": lambda z: complex(abs(z)),
}
_CONST = {"i": 1j, "pi": complex(math.pi)}


def evaluate(node: Node, x: float, bindings: Mapping[str, complex] | None = None) -> complex:
    """Evaluate ``node`` at a real ``x`` in IEEE double complex arithmetic."""
    b = bindings or {}

    def ev(n):
        if isinstance(n, Num):
            return complex(n.value)
        if isinstance(n, Var):
            return complex(x)
        if isinstance(n, Const):
            return _CONST[n.name]
        if isinstance(n, Param):
            try:
                return complex(b[n.name])
            except KeyError:
                raise UnboundParameter(f"parameter {n.name!r} is not bound") from None
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, Call):
            return _SCALAR_FN[n.func](ev(n.arg))
        lv, rv = ev(n.left), ev(n.right)
        if n.op == "+":
            return lv + rv
        if n.op == "-":
            return lv - rv
        if n.op == "*":
            return lv * rv
        if n.op == "/":
            _check_den(rv, "division")
            return lv / rv
        return _pow(lv, rv)

    return ev(node)


# ---------------------------------------------------------------- vectorized evaluation

def _vcheck(z: np.ndarray, what: str) -> None:
    if np.any(np.abs(z) < POLE_EPS):
        raise EvaluationPole(f"{what} denominator vanishes")


def _vpow(a, b):
    a = a + 0.0
    if np.ndim(b) == 0:
        bb = complex(b)
        if bb.imag == 0.0 and bb.real == int(bb.real) and abs(bb.real) <= _MAX_INT_POW:
            n = int(bb.real)
            if n < 0:
                _vcheck(a, "power")
                return 1.0 / _ipow(a, -n)
            return _ipow(a, n)
    if np.any(a == 0):
        br = np.broadcast_to(np.real(b), np.shape(a))
        if np.any((a == 0) & (br <= 0)):
            raise EvaluationPole("0 raised to a non-positive power")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp(b * np.log(a))
        return np.where(a == 0, 0j, out)
    return np.exp(b * np.log(a))


def _ipow(a, n: int):
    # same binary exponentiation order as CPython's complex ** int
    result = np.ones_like(a)
    base = a
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _vcoth(z):
    s = np.sinh(z)
    _vcheck(s, "coth")
    return np.cosh(z) / s


def _vln(z):
    z = z + 0.0
    if np.any(z == 0):
        raise EvaluationPole("ln(0)")
    return np.log(z)


_VECTOR_FN = {
    "exp": np.exp, "ln": _vln, "sin": np.sin, "cos": np.cos,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh, "coth": _vcoth,
    "sqrt": lambda z: np.sqrt(z + 0.0), "abs": lambda z: np.abs(z).astype(complex),
}


def evaluate_array(node: Node, x, bindings: Mapping[str, complex] | None = None) -> np.ndarray:
    """Vectorized evaluation over an array of real ``x``."""
    xa = np.asarray(x, dtype=float).astype(complex)
    b = bindings or {}

    def ev(n):
        if isinstance(n, Num):
            return np.full(xa.shape, complex(n.value))
        if isinstance(n, Var):
            return xa
        if isinstance(n, Const):
            return np.full(xa.shape, _CONST[n.name])
        if isinstance(n, Param):
            try:
                return np.full(xa.shape, complex(b[n.name]))
            except KeyError:
                raise UnboundParameter(f"parameter {n.name!r} is not bound") from None
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, Call):
            return _VECTOR_FN[n.func](ev(n.arg))
        lv, rv = ev(n.left), ev(n.right)
        if n.op == "+":
            return lv + rv
        if n.op == "-":
            return lv - rv
        if n.op == "*":
            return lv * rv
        if n.op == "/":
            _vcheck(rv, "division")
            return lv / rv
        if _is_constant(n.right) and rv.size:
            return _vpow(lv, complex(rv.flat[0]))
        return _vpow(lv, rv)

    with np.errstate(over="ignore", invalid="ignore"):
        return ev(node)


def _is_constant(node: Node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, (Num, Const, Param)):
        return True
    if isinstance(node, Neg):
        return _is_constant(node.operand)
    if isinstance(node, Call):
        return _is_constant(node.arg)
    return _is_constant(node.left) and _is_constant(node.right)


@dataclass(frozen=True)
class Expression:
    """A parsed source string with bound parameters, callable on arrays."""

    source: str
    ast: Node
    bindings: tuple[tuple[str, complex], ...] = ()

    @classmethod
    def compile(cls, source: str, bindings: Mapping[str, complex] | None = None) -> "Expression":
        ast = parse(source)
        b = {k: complex(v) for k, v in (bindings or {}).items()}
        missing = parameters(ast) - set(b)
        if missing:
            raise UnboundParameter(f"unbound parameters: {', '.join(sorted(missing))}")
        return cls(source, ast, tuple(sorted(b.items())))

    def __call__(self, x):
        b = dict(self.bindings)
        if np.ndim(x) == 0:
            return evaluate(self.ast, float(x), b)
        return evaluate_array(self.ast, x, b)
