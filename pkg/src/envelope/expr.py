"""Expression front end for holomorphic integrands.

The grammar admits only operations that keep a function single valued and
holomorphic on its natural domain: rational arithmetic, integer powers and
exp. There is deliberately no log and no fractional power.

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*     adjacent factors multiply
    factor  := '-' factor | base ('^' signed_int)?
    base    := 'z' | number | '(' expr ')' | 'exp' '(' expr ')'
    number  := real | '(' ['-'] real ('+'|'-') real 'i' ')'

Whitespace is insignificant and '^' binds tighter than unary minus, so
-z^2 means -(z^2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, PoleFindingError, PoleProximityError

DEFAULT_POLE_EXCLUSION = 1e-9

# Rational analysis gives up beyond this expanded polynomial degree.
POLY_DEGREE_CAP = 64

# Companion-matrix eigenvalues of an m-fold root scatter by roughly
# eps**(1/m) (about 6e-6 for m=3), so clustering must be much wider than
# machine precision. Distinct poles closer than this merge; that is out of
# scope at desk scale.
ROOT_CLUSTER_RADIUS = 1e-4


class Expr:
    """Base class for AST nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_expr(self)

    def __call__(self, z, exclusion: float = DEFAULT_POLE_EXCLUSION):
        return evaluate(self, z, exclusion)


@dataclass(frozen=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True)
class Var(Expr):
    """The sole free variable z."""


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


Z = Var()


@dataclass(frozen=True)
class PoleRecord:
    location: complex
    order: int


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            at = len(text) - len(stripped)
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", at)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {val!r}", pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                rhs = self.term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def _starts_base(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("num", "ident") or (kind == "op" and val == "(")

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                rhs = self.factor()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            elif self._starts_base():
                node = Mul(node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Mul(Const(-1 + 0j), inner)
        node = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            node = Pow(node, self.signed_int())
        return node

    def signed_int(self) -> int:
        sign = 1
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.next()
            sign = -1
        kind, val, pos = self.next()
        if kind != "num":
            raise ParseError("expected an integer exponent", pos)
        if not re.fullmatch(r"\d+", val):
            raise ParseError("exponent must be an integer", pos)
        return sign * int(val)

    def base(self) -> Expr:
        kind, val, pos = self.next()
        if kind == "num":
            return Const(complex(float(val), 0.0))
        if kind == "ident":
            if val == "z":
                return Z
            if val == "exp":
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Exp(arg)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            lit = self._complex_literal()
            if lit is not None:
                return lit
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(
            f"expected 'z', a number, '(' or 'exp', found {val or 'end of input'!r}",
            pos,
        )

    def _complex_literal(self) -> Const | None:
        """Try '(' [-] real (+|-) real 'i' ')' starting just after '('."""
        mark = self.i
        sign_re = 1.0
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            sign_re = -1.0
            kind, val, _ = self.peek()
        if kind != "num":
            self.i = mark
            return None
        re_part = sign_re * float(self.next()[1])
        kind, val, _ = self.peek()
        if kind != "op" or val not in "+-":
            self.i = mark
            return None
        sign_im = 1.0 if val == "+" else -1.0
        self.next()
        kind, val, _ = self.peek()
        if kind != "num":
            self.i = mark
            return None
        im_part = sign_im * float(self.next()[1])
        kind, val, _ = self.peek()
        if kind != "ident" or val != "i":
            self.i = mark
            return None
        self.next()
        kind, val, _ = self.peek()
        if kind != "op" or val != ")":
            self.i = mark
            return None
        self.next()
        return Const(complex(re_part, im_part))


def parse(text: str) -> Expr:
    """Parse expression text into an AST.

    Raises ParseError with the offending position on malformed input or
    unknown identifiers.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# evaluation

def evaluate(node: Expr, z, exclusion: float = DEFAULT_POLE_EXCLUSION):
    """Evaluate an AST at z, which may be a complex scalar or ndarray.

    Raises PoleProximityError whenever a divisor magnitude (or the base of a
    negative power) falls below `exclusion`; for a linear denominator z - a
    that is exactly the distance to the pole.
    """
    out = _eval(node, z, exclusion)
    if isinstance(z, np.ndarray):
        return np.broadcast_to(np.asarray(out, dtype=complex), z.shape).copy() \
            if np.ndim(out) == 0 else out
    return complex(out)


def _too_small(values, exclusion: float) -> bool:
    return bool(np.min(np.abs(values)) < exclusion)


def _eval(node: Expr, z, exclusion: float):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return z
    if isinstance(node, Add):
        return _eval(node.left, z, exclusion) + _eval(node.right, z, exclusion)
    if isinstance(node, Sub):
        return _eval(node.left, z, exclusion) - _eval(node.right, z, exclusion)
    if isinstance(node, Mul):
        return _eval(node.left, z, exclusion) * _eval(node.right, z, exclusion)
    if isinstance(node, Div):
        den = _eval(node.right, z, exclusion)
        if _too_small(den, exclusion):
            raise PoleProximityError(
                f"divisor magnitude below exclusion radius {exclusion:g}")
        return _eval(node.left, z, exclusion) / den
    if isinstance(node, Pow):
        base = _eval(node.base, z, exclusion)
        if node.exponent < 0 and _too_small(base, exclusion):
            raise PoleProximityError(
                f"negative power base below exclusion radius {exclusion:g}")
        if isinstance(base, np.ndarray):
            return base ** node.exponent
        return complex(base) ** node.exponent
    if isinstance(node, Exp):
        return np.exp(_eval(node.arg, z, exclusion))
    raise TypeError(f"not an Expr node: {node!r}")


def as_callable(node: Expr, exclusion: float = DEFAULT_POLE_EXCLUSION):
    """Wrap an AST as a plain vectorized callable z -> f(z)."""
    return lambda z: evaluate(node, z, exclusion)


# ---------------------------------------------------------------------------
# differentiation

def _c(value) -> Const:
    return Const(complex(value))


_ZERO = _c(0)
_ONE = _c(1)


def _is_const(node: Expr, value: complex | None = None) -> bool:
    return isinstance(node, Const) and (value is None or node.value == value)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0) or _is_const(b, 0):
        return _ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0):
        return _ZERO
    if _is_const(b, 1):
        return a
    return Div(a, b)


def differentiate(node: Expr) -> Expr:
    """Exact symbolic derivative with light constant folding."""
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Var):
        return _ONE
    if isinstance(node, Add):
        return _add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return _sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Mul):
        return _add(_mul(differentiate(node.left), node.right),
                    _mul(node.left, differentiate(node.right)))
    if isinstance(node, Div):
        num = _sub(_mul(differentiate(node.left), node.right),
                   _mul(node.left, differentiate(node.right)))
        return _div(num, _pow_node(node.right, 2))
    if isinstance(node, Pow):
        if node.exponent == 0:
            return _ZERO
        inner = differentiate(node.base)
        scaled = _mul(_c(node.exponent), _pow_node(node.base, node.exponent - 1))
        return _mul(scaled, inner)
    if isinstance(node, Exp):
        return _mul(node, differentiate(node.arg))
    raise TypeError(f"not an Expr node: {node!r}")


def _pow_node(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return _ONE
    if exponent == 1:
        return base
    return Pow(base, exponent)


# ---------------------------------------------------------------------------
# printing

def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_expr(node: Expr) -> str:
    """Render an AST as grammar-conformant text.

    parse(format_expr(a)) evaluates identically to a (the tree may differ
    in shape where constants folded).
    """
    if isinstance(node, Const):
        re_part, im_part = node.value.real, node.value.imag
        if im_part == 0:
            return _fmt_real(re_part)
        sign = "+" if im_part >= 0 else "-"
        return f"({_fmt_real(re_part)}{sign}{_fmt_real(abs(im_part))}i)"
    if isinstance(node, Var):
        return "z"
    if isinstance(node, Add):
        return f"({format_expr(node.left)} + {format_expr(node.right)})"
    if isinstance(node, Sub):
        return f"({format_expr(node.left)} - {format_expr(node.right)})"
    if isinstance(node, Mul):
        return f"({format_expr(node.left)} * {format_expr(node.right)})"
    if isinstance(node, Div):
        return f"({format_expr(node.left)} / {format_expr(node.right)})"
    if isinstance(node, Pow):
        base = format_expr(node.base)
        simple = isinstance(node.base, Var) or (
            isinstance(node.base, Const)
            and node.base.value.imag == 0
            and node.base.value.real >= 0)
        if not simple:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Exp):
        return f"exp({format_expr(node.arg)})"
    raise TypeError(f"not an Expr node: {node!r}")


# ---------------------------------------------------------------------------
# pole analysis

def _poly_trim(c: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.abs(c) > 1e-14 * scale
    last = int(np.max(np.nonzero(keep)[0])) if keep.any() else 0
    return c[: last + 1]


def _poly_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = _poly_trim(np.convolve(a, b))
    if out.size - 1 > POLY_DEGREE_CAP:
        raise PoleFindingError(
            f"expanded degree {out.size - 1} exceeds cap {POLY_DEGREE_CAP}")
    return out


def _poly_add(a: np.ndarray, b: np.ndarray, sign: float = 1.0) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=complex)
    out[: a.size] += a
    out[: b.size] += sign * b
    return _poly_trim(out)


def _poly_pow(a: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for _ in range(n):
        out = _poly_mul(out, a)
    return out


def _as_rational(node: Expr) -> tuple[np.ndarray, np.ndarray] | None:
    """Return (numerator, denominator) coefficient arrays (ascending powers),
    or None when the expression is not rational."""
    if isinstance(node, Const):
        return np.array([node.value], dtype=complex), np.ones(1, dtype=complex)
    if isinstance(node, Var):
        return np.array([0, 1], dtype=complex), np.ones(1, dtype=complex)
    if isinstance(node, Exp):
        return None
    if isinstance(node, (Add, Sub)):
        a = _as_rational(node.left)
        b = _as_rational(node.right)
        if a is None or b is None:
            return None
        sign = 1.0 if isinstance(node, Add) else -1.0
        num = _poly_add(_poly_mul(a[0], b[1]), _poly_mul(b[0], a[1]), sign)
        return num, _poly_mul(a[1], b[1])
    if isinstance(node, Mul):
        a = _as_rational(node.left)
        b = _as_rational(node.right)
        if a is None or b is None:
            return None
        return _poly_mul(a[0], b[0]), _poly_mul(a[1], b[1])
    if isinstance(node, Div):
        a = _as_rational(node.left)
        b = _as_rational(node.right)
        if a is None or b is None:
            return None
        return _poly_mul(a[0], b[1]), _poly_mul(a[1], b[0])
    if isinstance(node, Pow):
        a = _as_rational(node.base)
        if a is None:
            return None
        n = node.exponent
        if n >= 0:
            return _poly_pow(a[0], n), _poly_pow(a[1], n)
        return _poly_pow(a[1], -n), _poly_pow(a[0], -n)
    raise TypeError(f"not an Expr node: {node!r}")


def _poly_roots(coeffs: np.ndarray) -> np.ndarray:
    if coeffs.size <= 1:
        return np.zeros(0, dtype=complex)
    try:
        return np.roots(coeffs[::-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise PoleFindingError(f"root finding failed to converge: {exc}") from exc


def _cluster(roots: np.ndarray) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda w: (w.real, w.imag)):
        for members in clusters:
            center = sum(members) / len(members)
            if abs(r - center) <= ROOT_CLUSTER_RADIUS * max(1.0, abs(center)):
                members.append(r)
                break
        else:
            clusters.append([r])
    return [(sum(m) / len(m), len(m)) for m in clusters]


def _poly_derive(c: np.ndarray) -> np.ndarray:
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def _poly_eval(c: np.ndarray, z: complex) -> complex:
    out = 0j
    for coef in c[::-1]:
        out = out * z + coef
    return out


def _polish(center: complex, mult: int, den: np.ndarray) -> complex:
    """Newton iterations on the (mult-1)st derivative, where the root is
    simple, to undo the eigenvalue scatter of repeated roots."""
    d = den
    for _ in range(mult - 1):
        d = _poly_derive(d)
    dp = _poly_derive(d)
    w = center
    for _ in range(4):
        denom = _poly_eval(dp, w)
        if abs(denom) == 0:
            break
        w = w - _poly_eval(d, w) / denom
    if abs(w - center) > 10 * ROOT_CLUSTER_RADIUS * max(1.0, abs(center)):
        return center
    return w


def pole_set(node: Expr) -> list[PoleRecord] | None:
    """Locate poles of a rational expression.

    Returns PoleRecords sorted by (re, im), or None when the expression is
    not rational (contains exp) and the pole set is unknown. Numerator roots
    cancel matching denominator roots, so removable factors do not report
    spurious poles. Distinct poles closer than about 1e-4 are treated as one.
    """
    rat = _as_rational(node)
    if rat is None:
        return None
    num, den = rat
    if den.size == 1 and den[0] == 0:
        raise PoleFindingError("denominator is identically zero")
    if np.all(np.abs(num) == 0):
        return []
    den_clusters = _cluster(_poly_roots(den))
    if not den_clusters:
        return []
    num_clusters = _cluster(_poly_roots(num))
    records = []
    for center, mult in den_clusters:
        center = _polish(center, mult, den)
        cancel = 0
        for ncenter, nmult in num_clusters:
            if abs(ncenter - center) <= ROOT_CLUSTER_RADIUS * max(1.0, abs(center)):
                cancel = nmult
                break
        order = mult - cancel
        if order > 0:
            records.append(PoleRecord(complex(center), order))
    records.sort(key=lambda p: (p.location.real, p.location.imag))
    return records
