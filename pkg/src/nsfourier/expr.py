"""Formula AST, evaluator and recursive-descent parsers.

Two text formats are understood:

* formulas in one variable ``x``, e.g. ``4*(-1)^2/(2^2*pi^2)`` or ``abs(x)^1.75``;
* piecewise specs ``P[x1 | e1 | x2 | e2 | ... | x_{m+1}]`` optionally followed
  by endpoint pins ``@xi=v``.

The full grammar is in ``docs/grammar.md``. Printing a tree with :func:`to_text`
and parsing it back gives a structurally identical tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DomainError, ParseError

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "ln", "sqrt", "abs")

# binding strength used by the printer
_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base class of all formula nodes. Nodes are immutable and hashable."""

    precedence = _PREC_ATOM

    def __call__(self, x):
        """Evaluate at a float or an array of floats.

        Raises :class:`DomainError` instead of ever returning nan/inf.
        """
        arr = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = self._compiled(arr)
        out = np.broadcast_to(np.asarray(out, dtype=float), arr.shape)
        if not np.all(np.isfinite(out)):
            raise DomainError(f"non-finite value of {to_text(self)}")
        if arr.ndim == 0:
            return float(out)
        return np.array(out)

    @cached_property
    def _compiled(self) -> Callable[[np.ndarray], np.ndarray]:
        return _compile(self)

    def subs(self, new: Expr) -> Expr:
        """Replace the variable by ``new``."""
        raise NotImplementedError

    def diff(self) -> Expr:
        raise NotImplementedError

    def has_var(self) -> bool:
        raise NotImplementedError

    def __str__(self):
        return to_text(self)

    # arithmetic sugar for building trees in library code
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float
    name: str | None = None

    def subs(self, new):
        return self

    def diff(self):
        return ZERO

    def has_var(self):
        return False


@dataclass(frozen=True, eq=True)
class Var(Expr):
    def subs(self, new):
        return new

    def diff(self):
        return ONE

    def has_var(self):
        return True


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr
    precedence = _PREC_UNARY

    def subs(self, new):
        return Neg(self.arg.subs(new))

    def diff(self):
        return neg(self.arg.diff())

    def has_var(self):
        return self.arg.has_var()


@dataclass(frozen=True, eq=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def subs(self, new):
        return Func(self.name, self.arg.subs(new))

    def has_var(self):
        return self.arg.has_var()

    def diff(self):
        u = self.arg
        du = u.diff()
        name = self.name
        if name == "sin":
            outer = Func("cos", u)
        elif name == "cos":
            outer = neg(Func("sin", u))
        elif name == "sinh":
            outer = Func("cosh", u)
        elif name == "cosh":
            outer = Func("sinh", u)
        elif name == "exp":
            outer = self
        elif name == "ln":
            outer = div(ONE, u)
        elif name == "sqrt":
            outer = div(Const(0.5), self)
        else:  # abs
            outer = div(u, self)
        return mul(outer, du)


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[self.op]

    def subs(self, new):
        return BinOp(self.op, self.left.subs(new), self.right.subs(new))

    def has_var(self):
        return self.left.has_var() or self.right.has_var()

    def diff(self):
        a, b = self.left, self.right
        da, db = a.diff(), b.diff()
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        if self.op == "/":
            return div(sub(mul(da, b), mul(a, db)), mul(b, b))
        # power
        if not b.has_var():
            return mul(mul(b, pow_(a, sub(b, ONE))), da)
        return mul(self, add(mul(db, Func("ln", a)), div(mul(b, da), a)))


ZERO = Const(0.0)
ONE = Const(1.0)
X = Var()
PI = Const(math.pi, "pi")


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(float(v))


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


# Tree builders with light constant folding; parsing never goes through them.
def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b) and a.name is None and b.name is None:
        return Const(a.value + b.value)
    if isinstance(b, Const) and b.name is None and b.value < 0:
        return BinOp("-", a, Const(-b.value))
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if _is_const(a) and _is_const(b) and a.name is None and b.name is None:
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return neg(b)
    if _is_const(a) and _is_const(b) and a.name is None and b.name is None:
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    return BinOp("/", a, b)


def pow_(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return ONE
    return BinOp("^", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const) and a.name is None:
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def affine(e: Expr, scale: float, shift: float = 0.0) -> Expr:
    """Return ``e(scale*x + shift)``."""
    inner = add(mul(Const(float(scale)), X), Const(float(shift)))
    return e.subs(inner)


# --------------------------------------------------------------------------
# evaluation


def _int_power(base, k: int):
    negative = k < 0
    k = abs(k)
    result = np.ones_like(base)
    b = base
    while k:
        if k & 1:
            result = result * b
        k >>= 1
        if k:
            b = b * b
    if negative:
        if np.any(result == 0):
            raise DomainError("zero raised to a negative power")
        result = 1.0 / result
    return result


def _checked(name, fn, bad):
    def run(u):
        if np.any(bad(u)):
            raise DomainError(f"{name} evaluated outside its domain")
        return fn(u)

    return run


_FUNC_IMPL = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
    "abs": np.abs,
    "ln": _checked("ln", np.log, lambda u: u <= 0),
    "sqrt": _checked("sqrt", np.sqrt, lambda u: u < 0),
}


def _compile(e: Expr):
    if isinstance(e, Const):
        v = e.value
        return lambda x: v
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Neg):
        f = _compile(e.arg)
        return lambda x: -np.asarray(f(x))
    if isinstance(e, Func):
        f = _compile(e.arg)
        impl = _FUNC_IMPL[e.name]
        return lambda x: impl(np.asarray(f(x), dtype=float))
    if isinstance(e, BinOp):
        fl, fr = _compile(e.left), _compile(e.right)
        op = e.op
        if op == "+":
            return lambda x: np.add(fl(x), fr(x))
        if op == "-":
            return lambda x: np.subtract(fl(x), fr(x))
        if op == "*":
            return lambda x: np.multiply(fl(x), fr(x))
        if op == "/":

            def _div(x):
                den = np.asarray(fr(x), dtype=float)
                if np.any(den == 0):
                    raise DomainError(f"division by zero in {to_text(e)}")
                return np.divide(fl(x), den)

            return _div
        # power
        if isinstance(e.right, Const) and float(e.right.value).is_integer():
            k = int(e.right.value)
            return lambda x: _int_power(np.asarray(fl(x), dtype=float), k)

        def _pow(x):
            base = np.asarray(fl(x), dtype=float)
            ex = np.asarray(fr(x), dtype=float)
            integral = ex == np.round(ex)
            if np.any((base < 0) & ~integral):
                raise DomainError(f"negative base with non-integer exponent in {to_text(e)}")
            if np.any((base == 0) & (ex < 0)):
                raise DomainError(f"zero raised to a negative power in {to_text(e)}")
            return np.power(base, ex)

        return _pow
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# printing


def format_number(v: float) -> str:
    """Shortest round-trip decimal for ``v``; integral values print without '.0'."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        if e.name is not None:
            return e.name
        s = format_number(e.value)
        return f"({s})" if e.value < 0 or s.startswith("-") else s
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        if isinstance(e.arg, Const) and e.arg.name is None:
            return f"-({to_text(e.arg)})"
        return "-" + _wrap(e.arg, _PREC_UNARY)
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, BinOp):
        if e.op in "+-":
            return f"{_wrap(e.left, _PREC_ADD)}{e.op}{_wrap(e.right, _PREC_MUL)}"
        if e.op in "*/":
            return f"{_wrap(e.left, _PREC_MUL)}{e.op}{_wrap(e.right, _PREC_UNARY)}"
        return f"{_wrap(e.left, _PREC_ATOM)}^{_wrap(e.right, _PREC_UNARY)}"
    raise TypeError(e)


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_text(e)
    if e.precedence < min_prec:
        return f"({s})"
    return s


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()|\[\]@=])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'name', 'op', 'eof'
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            toks.append(_Tok("eof", "", len(text.encode())))
            return toks
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", len(text[:i].encode()),
                             {"number", "name", "operator"})
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(), len(text[:i].encode())))
        i = m.end()


_ATOM_START = {"number", "x", "pi", "function", "'('"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def _next_is(self, text):
        return self.tok.kind == "op" and self.tok.text == text

    def advance(self) -> _Tok:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text, expected=None):
        if not self._next_is(text):
            self.fail(expected or {f"'{text}'"})
        return self.advance()

    def fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.offset, expected)

    # expr := term (('+' | '-') term)*
    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    # term := unary (('*' | '/') unary)*
    def term(self) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    # unary := ('-' | '+') unary | power
    def unary(self) -> Expr:
        if self._next_is("-"):
            self.advance()
            nxt = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
            if self.tok.kind == "num" and not (nxt and nxt.kind == "op" and nxt.text == "^"):
                return Const(-float(self.advance().text))
            return Neg(self.unary())
        if self._next_is("+"):
            self.advance()
            return self.unary()
        return self.power()

    # power := atom ('^' unary)?      (right associative through unary)
    def power(self) -> Expr:
        base = self.atom()
        if self._next_is("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(float(t.text))
        if t.kind == "name":
            self.advance()
            if t.text == "x":
                return X
            if t.text == "pi":
                return PI
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")", {"')'", "operator"})
                return Func(t.text, arg)
            raise ParseError(f"unknown name {t.text!r}", t.offset, _ATOM_START)
        if self._next_is("("):
            self.advance()
            inner = self.expr()
            self.expect(")", {"')'", "operator"})
            return inner
        self.fail(_ATOM_START)

    def end(self):
        if self.tok.kind != "eof":
            self.fail({"operator", "end of input"})


def parse_expr(text: str) -> Expr:
    """Parse a formula in ``x``.

    >>> parse_expr("x^2")(0.5)
    0.25
    """
    if not text or not text.strip():
        raise ParseError("empty formula", 0, _ATOM_START)
    p = _Parser(text)
    e = p.expr()
    p.end()
    return e


# --------------------------------------------------------------------------
# piecewise specs


@dataclass(frozen=True)
class PiecewiseSpec:
    """Ordered boundaries, one formula per segment, optional pinned endpoint values.

    ``pins[i]`` is the fixed value at ``boundaries[i]`` or ``None``.
    """

    boundaries: tuple[float, ...]
    exprs: tuple[Expr, ...]
    pins: tuple[float | None, ...] = field(default=())

    def __post_init__(self):
        b = tuple(float(v) for v in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "exprs", tuple(self.exprs))
        if not self.pins:
            object.__setattr__(self, "pins", (None,) * len(b))
        if len(self.exprs) != len(b) - 1 or len(self.exprs) < 1:
            raise ValueError("need exactly one expression per segment")
        if len(self.pins) != len(b):
            raise ValueError("pins must align with boundaries")
        if any(not math.isfinite(v) for v in b):
            raise ValueError("boundaries must be finite")
        if any(b1 <= b0 for b0, b1 in zip(b, b[1:])):
            raise ValueError("boundaries must be strictly increasing")

    @property
    def m(self) -> int:
        return len(self.exprs)

    def to_text(self) -> str:
        parts = [format_number(self.boundaries[0])]
        for e, b in zip(self.exprs, self.boundaries[1:]):
            parts += [to_text(e), format_number(b)]
        text = "P[" + " | ".join(parts) + "]"
        for b, v in zip(self.boundaries, self.pins):
            if v is not None:
                text += f" @{format_number(b)}={format_number(v)}"
        return text


def _const_value(p: _Parser, what: str) -> float:
    start = p.tok.offset
    e = p.expr()
    if e.has_var():
        raise ParseError(f"{what} must not depend on x", start, {"constant expression"})
    return float(e(0.0))


def parse_piecewise(text: str) -> PiecewiseSpec:
    """Parse ``P[x1 | e1 | x2 | ... | x_{m+1}] @xi=v ...``.

    Boundaries and pinned values may be constant expressions such as ``-pi/2``.
    """
    p = _Parser(text)
    t = p.tok
    if not (t.kind == "name" and t.text == "P"):
        p.fail({"'P'"})
    p.advance()
    p.expect("[")
    bounds = [_const_value(p, "boundary")]
    offsets = [t.offset]
    exprs = []
    while True:
        p.expect("|", {"'|'"})
        exprs.append(p.expr())
        if not p._next_is("|"):
            # a segment formula must be followed by a boundary
            p.fail({"'|'", "operator"})
        p.advance()
        offsets.append(p.tok.offset)
        bounds.append(_const_value(p, "boundary"))
        if p._next_is("]"):
            p.advance()
            break
        if not p._next_is("|"):
            p.fail({"'|'", "']'", "operator"})
    for i in range(1, len(bounds)):
        if not bounds[i] > bounds[i - 1]:
            raise ParseError("boundaries must be strictly increasing", offsets[i], {"larger boundary"})
    pins = [None] * len(bounds)
    while p._next_is("@"):
        p.advance()
        at = p.tok.offset
        where = _const_value(p, "pin location")
        p.expect("=")
        value = _const_value(p, "pin value")
        matches = [i for i, b in enumerate(bounds) if b == where]
        if not matches:
            raise ParseError(f"pin location {format_number(where)} is not a boundary", at, {"boundary value"})
        pins[matches[0]] = value
    p.end()
    return PiecewiseSpec(tuple(bounds), tuple(exprs), tuple(pins))
