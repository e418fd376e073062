"""Arithmetic expression trees and a multivariate polynomial normal form.

Expressions are built from constants, named variables, the time symbol
``t``, negation, ``+ - * /`` and natural powers.  They print as ordinary
infix strings with ``^`` for powers; variable names that are not plain
identifiers are written in brackets, e.g. ``[H+]``.
"""
from __future__ import annotations

import contextvars
import math
import random
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import DivisionByZero, UnboundVariable

Number = Union[int, float]

_IDENT = re.compile(r"[^\W\d][\w.]*")
TIME_KEY = "\x00t"


# serialization prints full precision; display trims to 12 significant digits
_EXACT = contextvars.ContextVar("exact_numbers", default=False)


def _fmt_number(v: float) -> str:
    if math.isfinite(v) and v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v) if _EXACT.get() else format(v, ".12g")


def exact_str(e: Expr) -> str:
    """Like ``str(e)`` but with every constant printed losslessly."""
    token = _EXACT.set(True)
    try:
        return str(e)
    finally:
        _EXACT.reset(token)


def format_label(name: str) -> str:
    if name != "t" and _IDENT.fullmatch(name):
        return name
    if "]" in name:
        raise ValueError(f"label {name!r} cannot be printed")
    return f"[{name}]"


def _wrap(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return Const(float(x))
    raise TypeError(f"cannot use {x!r} in an expression")


class Expr:
    """Base class; subclasses are immutable dataclasses."""

    precedence = 9

    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Sub(self, _wrap(other))

    def __rsub__(self, other):
        return Sub(_wrap(other), self)

    def __mul__(self, other):
        return Mul(self, _wrap(other))

    def __rmul__(self, other):
        return Mul(_wrap(other), self)

    def __truediv__(self, other):
        return Div(self, _wrap(other))

    def __rtruediv__(self, other):
        return Div(_wrap(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n: int):
        return Pow(self, n)

    # -- interface implemented by subclasses --------------------------------

    def children(self) -> tuple[Expr, ...]:
        return ()

    def rebuild(self, kids: Sequence[Expr]) -> Expr:
        return self

    def variables(self) -> set[str]:
        out: set[str] = set()
        stack: list[Expr] = [self]
        while stack:
            e = stack.pop()
            if isinstance(e, Var):
                out.add(e.name)
            stack.extend(e.children())
        return out

    def uses_time(self) -> bool:
        if isinstance(self, Time):
            return True
        return any(c.uses_time() for c in self.children())

    def substitute(self, mapping: Mapping[str, Expr]) -> Expr:
        if isinstance(self, Var):
            return mapping.get(self.name, self)
        kids = self.children()
        if not kids:
            return self
        return self.rebuild([k.substitute(mapping) for k in kids])

    def rename(self, mapping: Mapping[str, str]) -> Expr:
        return self.substitute({k: Var(v) for k, v in mapping.items()})

    def evaluate(self, env: Mapping[str, float], t: float = 0.0) -> float:
        raise NotImplementedError

    def to_poly(self) -> Optional[Poly]:
        """Polynomial normal form, or ``None`` outside the polynomial fragment."""
        raise NotImplementedError

    def _child_str(self, child: Expr, min_prec: int) -> str:
        s = str(child)
        return f"({s})" if child.precedence < min_prec else s


@dataclass(frozen=True, repr=False)
class Const(Expr):
    value: float

    @property
    def precedence(self):
        return 3 if self.value < 0 else 9

    def evaluate(self, env, t=0.0):
        return self.value

    def to_poly(self):
        return Poly.constant(self.value)

    def __str__(self):
        return _fmt_number(self.value)

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True, repr=False)
class Var(Expr):
    name: str

    def evaluate(self, env, t=0.0):
        try:
            return env[self.name]
        except KeyError:
            raise UnboundVariable(self.name) from None

    def to_poly(self):
        return Poly({((self.name, 1),): 1.0})

    def __str__(self):
        return format_label(self.name)

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Time(Expr):
    def evaluate(self, env, t=0.0):
        return t

    def to_poly(self):
        return Poly({((TIME_KEY, 1),): 1.0})

    def __str__(self):
        return "t"

    def __repr__(self):
        return "Time()"


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr
    precedence = 3

    def children(self):
        return (self.arg,)

    def rebuild(self, kids):
        return Neg(kids[0])

    def evaluate(self, env, t=0.0):
        return -self.arg.evaluate(env, t)

    def to_poly(self):
        p = self.arg.to_poly()
        return None if p is None else -p

    def __str__(self):
        # -(a*b) and (-a)*b coincide, so products need no parentheses
        return "-" + self._child_str(self.arg, 2)

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, repr=False)
class _Binary(Expr):
    left: Expr
    right: Expr
    symbol = "?"

    def children(self):
        return (self.left, self.right)

    def rebuild(self, kids):
        return type(self)(kids[0], kids[1])

    def __str__(self):
        lhs = self._child_str(self.left, self.precedence)
        rhs = self._child_str(self.right, self.precedence + (0 if self._assoc else 1))
        return f"{lhs} {self.symbol} {rhs}" if self.precedence == 1 else f"{lhs}{self.symbol}{rhs}"

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Add(_Binary):
    symbol = "+"
    precedence = 1
    _assoc = True

    def evaluate(self, env, t=0.0):
        return self.left.evaluate(env, t) + self.right.evaluate(env, t)

    def to_poly(self):
        a, b = self.left.to_poly(), self.right.to_poly()
        return None if a is None or b is None else a + b


@dataclass(frozen=True, repr=False)
class Sub(_Binary):
    symbol = "-"
    precedence = 1
    _assoc = False

    def evaluate(self, env, t=0.0):
        return self.left.evaluate(env, t) - self.right.evaluate(env, t)

    def to_poly(self):
        a, b = self.left.to_poly(), self.right.to_poly()
        return None if a is None or b is None else a - b


@dataclass(frozen=True, repr=False)
class Mul(_Binary):
    symbol = "*"
    precedence = 2
    _assoc = True

    def evaluate(self, env, t=0.0):
        return self.left.evaluate(env, t) * self.right.evaluate(env, t)

    def to_poly(self):
        a, b = self.left.to_poly(), self.right.to_poly()
        return None if a is None or b is None else a * b


@dataclass(frozen=True, repr=False)
class Div(_Binary):
    symbol = "/"
    precedence = 2
    _assoc = False

    def __post_init__(self):
        if isinstance(self.right, Const) and self.right.value == 0:
            raise DivisionByZero("division by the constant 0")

    def evaluate(self, env, t=0.0):
        den = self.right.evaluate(env, t)
        if den == 0:
            raise DivisionByZero(f"denominator {self.right} vanished")
        return self.left.evaluate(env, t) / den

    def to_poly(self):
        a, b = self.left.to_poly(), self.right.to_poly()
        if a is None or b is None:
            return None
        c = b.constant_value()
        if c is None or c == 0:
            return None
        return a.scale(1.0 / c)


@dataclass(frozen=True, repr=False)
class Pow(Expr):
    base: Expr
    exponent: int
    precedence = 4

    def __post_init__(self):
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool) or self.exponent < 0:
            raise ValueError(f"exponent must be a natural number, got {self.exponent!r}")

    def children(self):
        return (self.base,)

    def rebuild(self, kids):
        return Pow(kids[0], self.exponent)

    def evaluate(self, env, t=0.0):
        return self.base.evaluate(env, t) ** self.exponent

    def to_poly(self):
        p = self.base.to_poly()
        return None if p is None else p ** self.exponent

    def __str__(self):
        return f"{self._child_str(self.base, 5)}^{self.exponent}"

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exponent})"


ZERO = Const(0.0)


def total(terms: Iterable[Expr]) -> Expr:
    """Left-nested sum; the empty sum is ``0``."""
    result: Optional[Expr] = None
    for e in terms:
        result = e if result is None else Add(result, e)
    return ZERO if result is None else result


# -- polynomials ---------------------------------------------------------------

Monomial = tuple[tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for v, k in b:
        powers[v] = powers.get(v, 0) + k
    return tuple(sorted(powers.items()))


class Poly:
    """Sparse multivariate polynomial with float coefficients.

    Monomials are sorted tuples of ``(variable, power)``; zero coefficients
    are dropped, so equal polynomials have equal term dictionaries whenever
    the arithmetic is exact.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, float] = ()):
        self.terms = {m: float(c) for m, c in dict(terms).items() if c != 0}

    @classmethod
    def constant(cls, c: float) -> Poly:
        return cls({(): c})

    def constant_value(self) -> Optional[float]:
        if not self.terms:
            return 0.0
        if set(self.terms) == {()}:
            return self.terms[()]
        return None

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0.0) + c
        return Poly(out)

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def scale(self, s: float) -> Poly:
        return Poly({m: c * s for m, c in self.terms.items()})

    def __mul__(self, other: Poly) -> Poly:
        out: dict[Monomial, float] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0.0) + c1 * c2
        return Poly(out)

    def __pow__(self, n: int) -> Poly:
        result = Poly.constant(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def bind(self, values: Mapping[str, float]) -> Poly:
        """Substitute numbers for some variables."""
        out: dict[Monomial, float] = {}
        for m, c in self.terms.items():
            keep = []
            for v, k in m:
                if v in values:
                    c *= values[v] ** k
                else:
                    keep.append((v, k))
            key = tuple(keep)
            out[key] = out.get(key, 0.0) + c
        return Poly(out)

    def rename(self, mapping: Mapping[str, str]) -> Poly:
        out: dict[Monomial, float] = {}
        for m, c in self.terms.items():
            key = tuple(sorted(_merge_powers((mapping.get(v, v), k) for v, k in m)))
            out[key] = out.get(key, 0.0) + c
        return Poly(out)

    def close_to(self, other: Poly, tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(m, 0.0) - other.terms.get(m, 0.0)) <= tol for m in keys)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def sorted_terms(self, first: Iterable[str] = ()) -> list[tuple[Monomial, float]]:
        """Terms in canonical order: higher degree first, then lexicographic."""
        firsts = set(first)

        def key(item):
            mono, _ = item
            degree = sum(k for _, k in mono)
            return (-degree, [(v not in firsts, v, -k) for v, k in _factor_order(mono, firsts)])

        return sorted(self.terms.items(), key=key)

    def to_expr(self, first: Iterable[str] = ()) -> Expr:
        """Canonical expression; variables in ``first`` lead each product."""
        firsts = set(first)
        result: Optional[Expr] = None
        for mono, c in self.sorted_terms(firsts):
            factors: list[Expr] = []
            for v, k in _factor_order(mono, firsts):
                atom = Time() if v == TIME_KEY else Var(v)
                factors.append(atom if k == 1 else Pow(atom, k))
            mag = abs(c)
            if not factors:
                term: Expr = Const(mag)
            elif mag == 1:
                term = factors[0]
                for f in factors[1:]:
                    term = Mul(term, f)
            else:
                term = Const(mag)
                for f in factors:
                    term = Mul(term, f)
            if result is None:
                result = Neg(term) if c < 0 else term
            else:
                result = Sub(result, term) if c < 0 else Add(result, term)
        return ZERO if result is None else result

    def __repr__(self) -> str:
        return f"Poly({self.terms!r})"


def _merge_powers(items):
    merged: dict[str, int] = {}
    for v, k in items:
        merged[v] = merged.get(v, 0) + k
    return merged.items()


def _factor_order(mono: Monomial, firsts: set[str]) -> list[tuple[str, int]]:
    return sorted(mono, key=lambda vk: (vk[0] not in firsts, vk[0]))


def canonical(e: Expr, first: Iterable[str] = ()) -> Expr:
    """Polynomial normal form of ``e`` as an expression (``e`` if not polynomial)."""
    p = e.to_poly()
    return e if p is None else p.to_expr(first)


def equivalent(
    e1: Expr,
    e2: Expr,
    bindings: Optional[Mapping[str, float]] = None,
    poly_tol: float = 1e-12,
    points: int = 50,
    point_tol: float = 1e-10,
    seed: int = 0,
) -> bool:
    """Symbolic equality.

    Decided exactly (to ``poly_tol`` on coefficients) in the polynomial
    fragment; otherwise a semi-decision by evaluating both sides at random
    points drawn uniformly from ``[-2, 2]``.
    """
    bindings = dict(bindings or {})
    p1, p2 = e1.to_poly(), e2.to_poly()
    if p1 is not None and p2 is not None:
        return p1.bind(bindings).close_to(p2.bind(bindings), poly_tol)
    free = sorted((e1.variables() | e2.variables()) - set(bindings))
    rng = random.Random(seed)
    for _ in range(points):
        env = dict(bindings)
        env.update({v: rng.uniform(-2, 2) for v in free})
        t = rng.uniform(-2, 2)
        try:
            a, b = e1.evaluate(env, t), e2.evaluate(env, t)
        except DivisionByZero:
            continue
        if abs(a - b) > point_tol * max(1.0, abs(a), abs(b)):
            return False
    return True


# -- compilation ---------------------------------------------------------------


def _emit(e: Expr, index: Mapping[str, int], consts: Mapping[str, float]) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        if e.name in index:
            return f"x[{index[e.name]}]"
        if e.name in consts:
            return repr(float(consts[e.name]))
        raise UnboundVariable(e.name)
    if isinstance(e, Time):
        return "t"
    if isinstance(e, Neg):
        return f"(-{_emit(e.arg, index, consts)})"
    if isinstance(e, Pow):
        return f"({_emit(e.base, index, consts)})**{e.exponent}"
    if isinstance(e, _Binary):
        return f"({_emit(e.left, index, consts)}{e.symbol}{_emit(e.right, index, consts)})"
    raise TypeError(f"unknown node {e!r}")


def compile_exprs(
    exprs: Sequence[Expr], order: Sequence[str], consts: Mapping[str, float] = ()
) -> Callable[[Sequence[float], float], list[float]]:
    """Compile expressions into ``f(x, t) -> list`` with ``x`` indexed by ``order``.

    Names in ``consts`` are frozen to their values.
    """
    index = {v: i for i, v in enumerate(order)}
    consts = dict(consts)
    body = ", ".join(_emit(e, index, consts) for e in exprs)
    code = compile(f"lambda x, t: [{body}]", "<vector-field>", "eval")
    fn = eval(code, {"__builtins__": {}})

    def call(x, t=0.0):
        try:
            return fn(x, t)
        except ZeroDivisionError as exc:
            raise DivisionByZero(str(exc)) from None
        except OverflowError:
            return [math.inf] * len(exprs)

    return call


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<br>\[[^\]]*\])"
    r"|(?P<id>[^\W\d][\w.]*)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse expression {text!r} at position {pos}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def fail(self, what: str):
        raise ValueError(f"cannot parse expression {self.text!r}: {what}")

    def parse(self) -> Expr:
        if not self.tokens:
            self.fail("empty")
        e = self.expr()
        if self.pos != len(self.tokens):
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self) -> Expr:
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.unary()
            if isinstance(inner, Const) and inner.value > 0:
                return Const(-inner.value)
            return Neg(inner)
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() in (("op", "^"), ("op", "**")):
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                self.fail("exponents must be natural-number literals")
            return Pow(base, int(val))
        return base

    def atom(self) -> Expr:
        kind, val = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "br":
            return Var(val[1:-1])
        if kind == "id":
            return Time() if val == "t" else Var(val)
        if (kind, val) == ("op", "("):
            e = self.expr()
            if self.take() != ("op", ")"):
                self.fail("missing ')'")
            return e
        self.fail(f"unexpected {val!r}")


def parse(text: str) -> Expr:
    """Parse an infix expression; ``t`` is time, ``[name]`` quotes a label."""
    return _Parser(text).parse()
