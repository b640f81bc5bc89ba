"""A small closed expression language for real functions of ``x``.

Grammar (precedence from loosest to tightest)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | 'x' | '(' expr ')' | func '(' expr ')'
    func   := 'sin' | 'cos' | 'exp' | 'ln' | 'sqrt' | 'abs'

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.  Nodes are immutable
and callable; evaluation never returns NaN or an infinity, it raises
:class:`DomainError` instead.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields
from typing import Callable, Iterable

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "DomainError",
    "Node",
    "Const",
    "Var",
    "Unary",
    "Binary",
    "parse",
    "evaluate",
    "to_text",
    "check_nonnegative",
    "sample_grid",
    "const",
    "var",
    "kink_candidates",
]

UNARY_OPS = ("neg", "abs", "sin", "cos", "exp", "ln", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "abs")


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    """Malformed expression text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the real domain (ln/sqrt of a negative, x/0, 0^-1, overflow)."""

    def __init__(self, message: str, x: float):
        self.x = x
        super().__init__(f"{message} (x = {x!r})")


def _finite(y: float, what: str, x: float) -> float:
    if not math.isfinite(y):
        raise DomainError(f"{what} produced a non-finite value", x)
    return y


def _ln(y: float, x: float) -> float:
    if y <= 0.0:
        raise DomainError(f"ln of non-positive value {y!r}", x)
    return math.log(y)


def _sqrt(y: float, x: float) -> float:
    if y < 0.0:
        raise DomainError(f"sqrt of negative value {y!r}", x)
    return math.sqrt(y)


def _exp(y: float, x: float) -> float:
    try:
        return math.exp(y)
    except OverflowError:
        raise DomainError(f"exp({y!r}) overflows", x) from None


def _div(u: float, v: float, x: float) -> float:
    if v == 0.0:
        raise DomainError("division by zero", x)
    return _finite(u / v, "division", x)


def _pow(u: float, v: float, x: float) -> float:
    if u == 0.0 and v < 0.0:
        raise DomainError(f"0 raised to negative power {v!r}", x)
    try:
        # math.pow gives 0^0 = 1 and rejects negative bases with fractional exponents
        y = math.pow(u, v)
    except ValueError:
        raise DomainError(f"{u!r}^{v!r} is not real", x) from None
    except OverflowError:
        raise DomainError(f"{u!r}^{v!r} overflows", x) from None
    return _finite(y, "power", x)


_UNARY_IMPL: dict[str, Callable[[float, float], float]] = {
    "neg": lambda y, x: -y,
    "abs": lambda y, x: abs(y),
    "sin": lambda y, x: math.sin(y),
    "cos": lambda y, x: math.cos(y),
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
}

_BINARY_IMPL: dict[str, Callable[[float, float, float], float]] = {
    "add": lambda u, v, x: _finite(u + v, "addition", x),
    "sub": lambda u, v, x: _finite(u - v, "subtraction", x),
    "mul": lambda u, v, x: _finite(u * v, "multiplication", x),
    "div": _div,
    "pow": _pow,
}


class Node:
    """Base class of the expression AST.

    Subclasses are frozen dataclasses.  Calling a node evaluates it through a
    closure compiled once per node, so repeated calls are cheap and
    bit-for-bit reproducible.
    """

    __slots__ = ()

    def compile(self) -> Callable[[float], float]:
        fn = self.__dict__.get("_compiled")
        if fn is None:
            fn = self._build()
            object.__setattr__(self, "_compiled", fn)
        return fn

    def _build(self) -> Callable[[float], float]:  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, x: float) -> float:
        return self.compile()(float(x))

    def __str__(self) -> str:
        return to_text(self)

    def __reduce__(self):
        # the cached closure is not picklable; rebuild from the init fields
        return (type(self), tuple(getattr(self, f.name) for f in fields(self) if f.init))

    # arithmetic sugar for building expressions in code
    def __add__(self, other: Node | float) -> Binary:
        return Binary("add", self, _lift(other))

    def __radd__(self, other: float) -> Binary:
        return Binary("add", _lift(other), self)

    def __sub__(self, other: Node | float) -> Binary:
        return Binary("sub", self, _lift(other))

    def __rsub__(self, other: float) -> Binary:
        return Binary("sub", _lift(other), self)

    def __mul__(self, other: Node | float) -> Binary:
        return Binary("mul", self, _lift(other))

    def __rmul__(self, other: float) -> Binary:
        return Binary("mul", _lift(other), self)

    def __truediv__(self, other: Node | float) -> Binary:
        return Binary("div", self, _lift(other))

    def __rtruediv__(self, other: float) -> Binary:
        return Binary("div", _lift(other), self)

    def __pow__(self, other: Node | float) -> Binary:
        return Binary("pow", self, _lift(other))

    def __neg__(self) -> Unary:
        return Unary("neg", self)


def _lift(value: Node | float) -> Node:
    if isinstance(value, Node):
        return value
    return Const(float(value))


@dataclass(frozen=True, eq=True)
class Const(Node):
    value: float
    _compiled: Callable | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ExprError(f"constant must be finite, got {self.value!r}")
        object.__setattr__(self, "value", float(self.value))

    def _build(self) -> Callable[[float], float]:
        c = self.value
        return lambda x: c


@dataclass(frozen=True, eq=True)
class Var(Node):
    _compiled: Callable | None = field(default=None, init=False, repr=False, compare=False)

    def _build(self) -> Callable[[float], float]:
        return lambda x: x


@dataclass(frozen=True, eq=True)
class Unary(Node):
    op: str
    arg: Node
    _compiled: Callable | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.op not in _UNARY_IMPL:
            raise ExprError(f"unknown unary operator {self.op!r}")

    def _build(self) -> Callable[[float], float]:
        inner = self.arg.compile()
        impl = _UNARY_IMPL[self.op]
        op = self.op

        def fn(x: float) -> float:
            y = impl(inner(x), x)
            if y != y:
                raise DomainError(f"{op} produced NaN", x)
            return y

        return fn


@dataclass(frozen=True, eq=True)
class Binary(Node):
    op: str
    left: Node
    right: Node
    _compiled: Callable | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.op not in _BINARY_IMPL:
            raise ExprError(f"unknown binary operator {self.op!r}")

    def _build(self) -> Callable[[float], float]:
        lf = self.left.compile()
        rf = self.right.compile()
        impl = _BINARY_IMPL[self.op]
        return lambda x: impl(lf(x), rf(x), x)


def const(value: float) -> Const:
    return Const(float(value))


def var() -> Var:
    return Var()


def evaluate(e: Node, x: float) -> float:
    """Evaluate ``e`` at ``x``; raises :class:`DomainError` off the real domain."""
    return e(x)


# ---------------------------------------------------------------------------
# parsing

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_SYMBOLS = "+-*/^()"


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", a symbol character, or "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    raw = text.encode("utf-8")
    tokens = []
    pos = 0
    # offsets are reported in bytes, so work on a str view but track the byte position
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        boff = len(text[:pos].encode("utf-8"))
        m = _NUMBER.match(text, pos)
        if m:
            tokens.append(_Token("num", m.group(), boff))
            pos = m.end()
            continue
        m = _IDENT.match(text, pos)
        if m:
            tokens.append(_Token("ident", m.group(), boff))
            pos = m.end()
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(ch, ch, boff))
            pos += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", boff, text)
    tokens.append(_Token("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: _Token | None = None) -> ExprSyntaxError:
        tok = tok or self.tok
        return ExprSyntaxError(message, tok.offset, self.text)

    def expect(self, kind: str) -> _Token:
        tok = self.tok
        if tok.kind != kind:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise self.fail(f"expected {kind!r}, found {found}")
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.fail(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = "add" if self.tok.kind == "+" else "sub"
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.tok.kind in ("*", "/"):
            op = "mul" if self.tok.kind == "*" else "div"
            self.i += 1
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.tok.kind == "-":
            self.i += 1
            return Unary("neg", self.factor())
        base = self.atom()
        if self.tok.kind == "^":
            self.i += 1
            return Binary("pow", base, self.factor())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            value = float(tok.text)
            if not math.isfinite(value):
                raise self.fail(f"number {tok.text!r} out of range", tok)
            return Const(value)
        if tok.kind == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.i += 1
            if tok.text == "x":
                return Var()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            raise self.fail(f"unknown identifier {tok.text!r}", tok)
        if tok.kind == "end":
            raise self.fail("unexpected end of input")
        raise self.fail(f"unexpected {tok.text!r}")


def parse(text: str) -> Node:
    """Parse ``text`` into an expression tree.

    >>> parse("x^2")(2.0)
    4.0
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_LEVEL = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _level(node: Node) -> int:
    if isinstance(node, Binary):
        return _LEVEL[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return 3
    if isinstance(node, Const) and math.copysign(1.0, node.value) < 0:
        return 3  # printed with a leading minus
    return 5


def _wrap(node: Node, wrap: bool) -> str:
    s = to_text(node)
    return f"({s})" if wrap else s


def to_text(node: Node) -> str:
    """Render ``node`` with the fewest parentheses that preserve its tree shape."""
    if isinstance(node, Const):
        v = node.value
        if v.is_integer() and abs(v) < 1e15 and not (v == 0.0 and math.copysign(1.0, v) < 0):
            return str(int(v))
        return repr(v)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.arg, _level(node.arg) < 3)
        return f"{node.op}({to_text(node.arg)})"
    if isinstance(node, Binary):
        level = _LEVEL[node.op]
        sym = _SYMBOL[node.op]
        if node.op == "pow":
            left = _wrap(node.left, _level(node.left) < 5)
            right = _wrap(node.right, _level(node.right) < 3)
            return f"{left}^{right}"
        left = _wrap(node.left, _level(node.left) < level)
        right = _wrap(node.right, _level(node.right) <= level)
        return f"{left} {sym} {right}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# sampling helpers

def sample_grid(a: float, b: float, samples: int) -> list[float]:
    """``samples`` uniformly spaced points from ``a`` to ``b`` inclusive."""
    if samples < 2:
        raise ValueError("samples must be at least 2")
    n = samples - 1
    pts = [a + (b - a) * j / n for j in range(samples)]
    pts[-1] = b
    return pts


def check_nonnegative(e: Node, interval, samples: int = 1001) -> bool:
    """Sampling probe: is ``e >= -1e-12`` on a uniform grid over the interval?

    A ``True`` answer is evidence, not a proof.
    """
    a, b = interval
    fn = e.compile()
    return all(fn(x) >= -1e-12 for x in sample_grid(a, b, samples))


def iter_nodes(node: Node) -> Iterable[Node]:
    yield node
    if isinstance(node, Unary):
        yield from iter_nodes(node.arg)
    elif isinstance(node, Binary):
        yield from iter_nodes(node.left)
        yield from iter_nodes(node.right)


def kink_candidates(node: Node) -> list[Node]:
    """Sub-expressions whose sign changes make ``node`` non-smooth (abs/sqrt arguments)."""
    return [n.arg for n in iter_nodes(node) if isinstance(n, Unary) and n.op in ("abs", "sqrt")]
