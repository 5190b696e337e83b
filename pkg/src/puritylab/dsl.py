"""A small language for writing down multi-qudit states.

Grammar (recursive descent, one token of lookahead)::

    expr     := tensor
    tensor   := power {("x" | "⊗") power}
    power    := atom ["^" int]
    atom     := mixture | named | ket_sum | "(" expr ")" ["/" "sqrt" "(" int ")"]
    mixture  := "mix" "(" weight ":" tensor {"," weight ":" tensor} ")"
    weight   := number ["/" int]
    named    := ("ghz" "(" int ["," int] ")") | ("w" "(" int ")")
              | "bell" | "phi+" | "phi-" | "psi+" | "psi-"
    ket_sum  := ["-"] term {("+" | "-") term}
    term     := [coef "*"] "|" digits ">"
    coef     := number ["/" (int | "sqrt" "(" int ")")]

Ket digits are one digit per site (``|012>``) or comma separated for
local dimensions above 10 (``|1,0,12>``).  The local dimension of an
explicit ket's site is one more than the largest digit used there, and at
least 2.

Examples::

    ghz(3) x bell
    (|000> + |111>)/sqrt(2)
    mix(0.5: |00>, 0.5: bell)
    1/sqrt(2)*|01> - 1/sqrt(2)*|10>
    ghz(3)^5
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .states import (
    ATOL,
    DensityMatrix,
    DimensionCapExceeded,
    LocalDims,
    PureState,
    State,
    StateError,
    get_max_dim,
)


class ParseError(ValueError):
    """Syntax error with a position in the source text."""

    def __init__(self, message: str, text: str, pos: int, expected=()):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.expected = tuple(sorted(set(expected)))
        self.message = message
        detail = f"line {self.line}, column {self.column}: {message}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)

    def caret(self) -> str:
        """The offending source line with a caret under the error position."""
        start = self.text.rfind("\n", 0, self.pos) + 1
        end = self.text.find("\n", self.pos)
        line = self.text[start:] if end < 0 else self.text[start:end]
        return f"{line}\n{' ' * (self.column - 1)}^"


class UnknownStateError(ParseError):
    pass


class DimensionMismatchError(ParseError):
    pass


class NotNormalizedError(StateError):
    pass


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    """The real number ``num / sqrt(root)``."""

    num: Fraction = Fraction(1)
    root: int = 1

    @property
    def value(self) -> float:
        return float(self.num) / math.sqrt(self.root)

    def negate(self) -> "Scalar":
        return Scalar(-self.num, self.root)


@dataclass(frozen=True)
class Named:
    name: str
    arity: int
    local_dim: int = 2
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Term:
    coef: Scalar
    digits: tuple[int, ...]


@dataclass(frozen=True)
class Ket:
    terms: tuple[Term, ...]
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Scaled:
    child: "Expr"
    root: int
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Power:
    child: "Expr"
    exponent: int
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Tensor:
    children: tuple["Expr", ...]
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Mixture:
    weights: tuple[Fraction, ...]
    children: tuple["Expr", ...]
    pos: int = field(default=0, compare=False)


Expr = Union[Named, Ket, Scaled, Power, Tensor, Mixture]

NAMED_STATES = ("ghz", "bell", "phi+", "phi-", "psi+", "psi-", "w")


# -- lexer -------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, KET, EOF, or the symbol itself
    text: str
    pos: int


SYMBOLS = set("()+-*/:,^")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "⊗":
            tokens.append(Token("x", c, i))
            i += 1
        elif c in SYMBOLS:
            tokens.append(Token(c, c, i))
            i += 1
        elif c == "|":
            end = text.find(">", i + 1)
            bad = next((k for k in range(i + 1, n if end < 0 else end) if text[k] in "|(\n"), None)
            if end < 0 or bad is not None:
                raise ParseError("unterminated ket", text, i, ["'>'"])
            tokens.append(Token("KET", text[i + 1:end], i))
            i = end + 1
        elif c.isdecimal() or (c == "." and i + 1 < n and text[i + 1].isdecimal()):
            j = i
            while j < n and text[j].isdecimal():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdecimal():
                    j += 1
            tokens.append(Token("NUM", text[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j].lower()
            if word in ("phi", "psi") and j < n and text[j] in "+-":
                word += text[j]
                j += 1
            tokens.append(Token("x" if word == "x" else "NAME", word, i))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", text, i)
    tokens.append(Token("EOF", "", n))
    return tokens


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message, expected=(), tok=None):
        tok = tok or self.tok
        return ParseError(message, self.text, tok.pos, expected)

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            label = what or f"'{kind}'"
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", [label])
        return self.advance()

    def expect_name(self, name: str) -> Token:
        if self.tok.kind != "NAME" or self.tok.text != name:
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", [f"'{name}'"])
        return self.advance()

    def integer(self, minimum: int = 0) -> int:
        tok = self.expect("NUM", "integer")
        if not tok.text.isdecimal():
            raise self.error("expected an integer", ["integer"], tok)
        v = int(tok.text)
        if v < minimum:
            raise self.error(f"value must be at least {minimum}", tok=tok)
        return v

    def number(self) -> Fraction:
        return Fraction(self.expect("NUM", "number").text)

    # grammar rules

    def parse(self) -> Expr:
        if self.tok.kind == "EOF":
            raise self.error("empty expression", ["state expression"])
        e = self.tensor()
        if self.tok.kind != "EOF":
            raise self.error(f"unexpected {self.tok.text!r}", ["'x'", "end of input"])
        return e

    def tensor(self) -> Expr:
        pos = self.tok.pos
        children = [self.power()]
        while self.tok.kind == "x":
            self.advance()
            children.append(self.power())
        return children[0] if len(children) == 1 else Tensor(tuple(children), pos)

    def power(self) -> Expr:
        pos = self.tok.pos
        atom = self.atom()
        if self.tok.kind == "^":
            self.advance()
            return Power(atom, self.integer(1), pos)
        return atom

    ATOM_START = ["'('", "'mix'", "named state", "ket", "coefficient"]

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "NAME":
            return self.mixture() if tok.text == "mix" else self.named()
        if tok.kind == "(":
            self.advance()
            inner = self.tensor()
            self.expect(")")
            if self.tok.kind == "/":
                self.advance()
                self.expect_name("sqrt")
                self.expect("(")
                root = self.integer(1)
                self.expect(")")
                return Scaled(inner, root, tok.pos)
            return inner
        if tok.kind in ("KET", "NUM", "-"):
            return self.ket_sum()
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}", self.ATOM_START)

    def mixture(self) -> Mixture:
        pos = self.advance().pos
        self.expect("(")
        weights, children = [], []
        while True:
            w = self.number()
            if self.tok.kind == "/":
                self.advance()
                w = w / self.integer(1)
            self.expect(":")
            weights.append(w)
            children.append(self.tensor())
            if self.tok.kind == ",":
                self.advance()
                continue
            if self.tok.kind != ")":
                raise self.error(f"unexpected {self.tok.text or 'end of input'!r}", ["','", "')'"])
            self.advance()
            if sum(weights) != 1:
                raise ParseError(f"mixture weights sum to {sum(weights)}, not 1", self.text, pos)
            return Mixture(tuple(weights), tuple(children), pos)

    def named(self) -> Named:
        tok = self.advance()
        name = "phi+" if tok.text == "bell" else tok.text
        if name not in NAMED_STATES:
            raise UnknownStateError(f"unknown named state {tok.text!r}", self.text, tok.pos,
                                    [f"'{s}'" for s in NAMED_STATES])
        if name == "ghz":
            self.expect("(")
            m = self.integer(1)
            d = 2
            if self.tok.kind == ",":
                self.advance()
                d = self.integer(2)
            self.expect(")")
            return Named("ghz", m, d, tok.pos)
        if name == "w":
            self.expect("(")
            m = self.integer(1)
            self.expect(")")
            return Named("w", m, 2, tok.pos)
        return Named(name, 2, 2, tok.pos)

    def ket_sum(self) -> Ket:
        pos = self.tok.pos
        negate = False
        if self.tok.kind == "-":
            self.advance()
            negate = True
        terms = [self.term(negate)]
        while self.tok.kind in ("+", "-"):
            negate = self.advance().kind == "-"
            terms.append(self.term(negate))
        n = len(terms[0].digits)
        for t in terms[1:]:
            if len(t.digits) != n:
                raise DimensionMismatchError(
                    f"ket has {len(t.digits)} sites, expected {n}", self.text, pos)
        return Ket(tuple(terms), pos)

    def term(self, negate: bool) -> Term:
        coef = Scalar()
        if self.tok.kind == "NUM":
            num = self.number()
            root = 1
            if self.tok.kind == "/":
                self.advance()
                if self.tok.kind == "NAME" and self.tok.text == "sqrt":
                    self.advance()
                    self.expect("(")
                    root = self.integer(1)
                    self.expect(")")
                else:
                    num = num / self.integer(1)
            coef = Scalar(num, root)
            self.expect("*")
        tok = self.expect("KET", "ket")
        digits = self.digits(tok)
        return Term(coef.negate() if negate else coef, digits)

    def digits(self, tok: Token) -> tuple[int, ...]:
        body = tok.text.strip()
        parts = [p.strip() for p in body.split(",")] if "," in body else list(body)
        if not parts or not all(p.isdecimal() for p in parts):
            raise self.error(f"bad ket contents {tok.text!r}", ["digits"], tok)
        return tuple(int(p) for p in parts)


def parse(text: str) -> Expr:
    """Parse ``text`` into an AST; raises :class:`ParseError` with a position."""
    expr = _Parser(text).parse()
    dims_of(expr, text)
    return expr


# -- static dimensions -------------------------------------------------------

def _repeat(dims: tuple[int, ...], times: int) -> tuple[int, ...]:
    # refuse before materializing huge dims tuples
    base = math.prod(dims)
    cap = get_max_dim()
    if times > cap.bit_length() or base ** times > cap:
        raise DimensionCapExceeded(f"total dimension {base}^{times} exceeds cap {cap}")
    return dims * times


def dims_of(expr: Expr, text: str = "") -> tuple[int, ...]:
    if isinstance(expr, Named):
        return _repeat((expr.local_dim,), expr.arity)
    if isinstance(expr, Ket):
        n = len(expr.terms[0].digits)
        return tuple(max(2, 1 + max(t.digits[i] for t in expr.terms)) for i in range(n))
    if isinstance(expr, Scaled):
        return dims_of(expr.child, text)
    if isinstance(expr, Power):
        return _repeat(dims_of(expr.child, text), expr.exponent)
    if isinstance(expr, Tensor):
        return sum((dims_of(c, text) for c in expr.children), ())
    if isinstance(expr, Mixture):
        dims = [dims_of(c, text) for c in expr.children]
        for d in dims[1:]:
            if d != dims[0]:
                raise DimensionMismatchError(
                    f"mixture branches have dims {list(dims[0])} and {list(d)}", text, expr.pos)
        return dims[0]
    raise TypeError(f"not a state expression: {expr!r}")


def contains_mixture(expr: Expr) -> bool:
    if isinstance(expr, Mixture):
        return True
    if isinstance(expr, (Scaled, Power)):
        return contains_mixture(expr.child)
    if isinstance(expr, Tensor):
        return any(contains_mixture(c) for c in expr.children)
    return False


# -- evaluation --------------------------------------------------------------

def named_amplitudes(name: str, arity: int, local_dim: int = 2) -> np.ndarray:
    """Amplitude vector of one of the built-in named states."""
    if name == "ghz":
        dims = LocalDims((local_dim,) * arity)
        v = np.zeros(dims.total_dim, dtype=complex)
        for j in range(local_dim):
            v[dims.index([j] * arity)] = 1.0
        return v / math.sqrt(local_dim)
    if name == "w":
        dims = LocalDims((2,) * arity)
        v = np.zeros(dims.total_dim, dtype=complex)
        for k in range(arity):
            v[1 << (arity - 1 - k)] = 1.0
        return v / math.sqrt(arity)
    r = 1 / math.sqrt(2)
    table = {
        "phi+": [r, 0, 0, r],
        "phi-": [r, 0, 0, -r],
        "psi+": [0, r, r, 0],
        "psi-": [0, r, -r, 0],
    }
    return np.array(table[name], dtype=complex)


def _normalized(dims, v: np.ndarray, strict: bool) -> np.ndarray:
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) <= ATOL:
        return v
    if strict or norm2 == 0.0:
        raise NotNormalizedError(f"state with dims {list(dims)} has norm^2 {norm2:.12g}, not 1")
    warnings.warn(f"renormalizing state with norm^2 {norm2:.6g}", stacklevel=3)
    return v / math.sqrt(norm2)


class _Evaluator:
    def __init__(self, strict: bool):
        self.strict = strict

    def raw(self, expr: Expr):
        """(dims, vector) for pure nodes, (dims, matrix) flagged by ndim for mixed."""
        dims = LocalDims(dims_of(expr))  # raises before allocating past the cap
        if isinstance(expr, Named):
            return dims, named_amplitudes(expr.name, expr.arity, expr.local_dim)
        if isinstance(expr, Ket):
            v = np.zeros(dims.total_dim, dtype=complex)
            for t in expr.terms:
                v[dims.index(t.digits)] += t.coef.value
            return dims, v
        if isinstance(expr, Scaled):
            _, v = self.raw(expr.child)
            if v.ndim != 1:
                raise StateError("cannot scale a mixture")
            return dims, v / math.sqrt(expr.root)
        if isinstance(expr, Power):
            _, v = self.checked(expr.child)
            out = v
            for _ in range(expr.exponent - 1):
                out = np.kron(out, v)
            return dims, out
        if isinstance(expr, Tensor):
            parts = [self.checked(c)[1] for c in expr.children]
            if any(p.ndim == 2 for p in parts):
                parts = [p if p.ndim == 2 else np.outer(p, p.conj()) for p in parts]
            out = parts[0]
            for p in parts[1:]:
                out = np.kron(out, p)
            return dims, out
        if isinstance(expr, Mixture):
            total = sum(expr.weights)
            if any(w < 0 for w in expr.weights) or abs(float(total) - 1.0) > ATOL:
                raise StateError(f"mixture weights must be non-negative and sum to 1, got {float(total):.12g}")
            m = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
            for w, c in zip(expr.weights, expr.children):
                _, p = self.checked(c)
                m += float(w) * (p if p.ndim == 2 else np.outer(p, p.conj()))
            return dims, m
        raise TypeError(f"not a state expression: {expr!r}")

    def checked(self, expr: Expr):
        dims, v = self.raw(expr)
        if v.ndim == 1:
            v = _normalized(dims, v, self.strict)
        return dims, v


def evaluate(expr: Expr, strict: bool = True) -> State:
    """Evaluate an AST to a state.

    Any mixture makes the result a :class:`DensityMatrix`.  With
    ``strict=False`` non-normalized kets are rescaled with a warning instead
    of raising :class:`NotNormalizedError`.
    """
    dims, v = _Evaluator(strict).checked(expr)
    if v.ndim == 1:
        return PureState(dims, v)
    return DensityMatrix(dims, v)


def state(text: str, strict: bool = True) -> State:
    return evaluate(parse(text), strict)


# -- printing ----------------------------------------------------------------

def _fraction_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _digits_text(digits) -> str:
    if any(d > 9 for d in digits):
        return ",".join(str(d) for d in digits)
    return "".join(str(d) for d in digits)


def _term_text(t: Term, first: bool) -> str:
    num = t.coef.num
    sign = "-" if num < 0 else "+"
    mag = Scalar(abs(num), t.coef.root)
    if mag == Scalar():
        body = f"|{_digits_text(t.digits)}>"
    elif mag.root == 1:
        body = f"{_fraction_text(mag.num)}*|{_digits_text(t.digits)}>"
    else:
        body = f"{_fraction_text(mag.num)}/sqrt({mag.root})*|{_digits_text(t.digits)}>"
    if mag.root != 1 and mag.num.denominator != 1:
        raise ValueError("coefficient p/q/sqrt(k) has no concrete syntax")
    if first:
        return f"-{body}" if sign == "-" else body
    return f" {sign} {body}"


def to_text(expr: Expr) -> str:
    """Render an AST back to concrete syntax that parses to an equal AST."""
    if isinstance(expr, Named):
        if expr.name == "ghz":
            return f"ghz({expr.arity})" if expr.local_dim == 2 else f"ghz({expr.arity},{expr.local_dim})"
        if expr.name == "w":
            return f"w({expr.arity})"
        return expr.name
    if isinstance(expr, Ket):
        return "".join(_term_text(t, i == 0) for i, t in enumerate(expr.terms))
    if isinstance(expr, Scaled):
        return f"({to_text(expr.child)})/sqrt({expr.root})"
    if isinstance(expr, Power):
        return f"{_wrapped(expr.child)}^{expr.exponent}"
    if isinstance(expr, Tensor):
        return " x ".join(_wrapped(c) for c in expr.children)
    if isinstance(expr, Mixture):
        branches = ", ".join(f"{_fraction_text(w)}: {to_text(c)}"
                             for w, c in zip(expr.weights, expr.children))
        return f"mix({branches})"
    raise TypeError(f"not a state expression: {expr!r}")


def _wrapped(expr: Expr) -> str:
    simple = isinstance(expr, (Named, Mixture, Scaled)) or (
        isinstance(expr, Ket) and len(expr.terms) == 1 and expr.terms[0].coef.num > 0)
    return to_text(expr) if simple else f"({to_text(expr)})"
