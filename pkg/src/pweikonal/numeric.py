"""Exact arithmetic in Q(sqrt2).

Every length and functional value produced by the library is of the form
a + b*sqrt(2) with rational a and b. ``Q2`` keeps both coefficients as
``fractions.Fraction`` and compares values by sign analysis, so no floating
point ever enters an equality or ordering decision.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

SQRT2_FLOAT = math.sqrt(2.0)

LT, EQ, GT = -1, 0, 1


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.replace(" ", ""))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def sign_a_b_sqrt2(a, b) -> int:
    """Sign of a + b*sqrt(2) for rationals (or ints) a, b."""
    if a >= 0 and b >= 0:
        return 0 if (a == 0 and b == 0) else 1
    if a <= 0 and b <= 0:
        return -1
    # mixed signs: compare a^2 with 2 b^2
    lhs, rhs = a * a, 2 * b * b
    if lhs == rhs:
        return 0
    if a > 0:
        return 1 if lhs > rhs else -1
    return -1 if lhs > rhs else 1


class Q2:
    """Immutable number a + b*sqrt2 with rational coefficients."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("Q2 is immutable")

    @staticmethod
    def coerce(x) -> "Q2":
        if isinstance(x, Q2):
            return x
        if isinstance(x, str):
            return parse_q2(x)
        return Q2(x, 0)

    # arithmetic
    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Q2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Q2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Q2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        n = o.a * o.a - 2 * o.b * o.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        # multiply by the conjugate
        num = self * Q2(o.a, -o.b)
        return Q2(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return Q2(-self.a, -self.b)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def conjugate(self) -> "Q2":
        return Q2(self.a, -self.b)

    # ordering
    def sign(self) -> int:
        return sign_a_b_sqrt2(self.a, self.b)

    def compare(self, other) -> int:
        return (self - Q2.coerce(other)).sign()

    def __eq__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * SQRT2_FLOAT

    def is_rational(self) -> bool:
        return self.b == 0

    def __repr__(self):
        return f"Q2({format_q2(self)!r})"

    def __str__(self):
        return format_q2(self)


def _maybe(x):
    if isinstance(x, Q2):
        return x
    if isinstance(x, (int, Fraction)):
        return Q2(x, 0)
    return None


SQRT2 = Q2(0, 1)
ZERO = Q2(0, 0)
ONE = Q2(1, 0)


def q2_arith(op: str, x, y=None) -> Q2:
    """Dispatch form of the field operations: add, sub, mul, div, neg, abs."""
    x = Q2.coerce(x)
    if op in ("neg", "abs"):
        return -x if op == "neg" else abs(x)
    if y is None:
        raise ValueError(f"operation {op!r} needs two operands")
    y = Q2.coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def q2_compare(x, y) -> int:
    """Return LT (-1), EQ (0) or GT (1), exactly."""
    return Q2.coerce(x).compare(Q2.coerce(y))


def format_rational(r: Fraction) -> str:
    r = _frac(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_q2(x: Q2) -> str:
    """Canonical text: ``a``, ``b sqrt2`` or ``a + b sqrt2`` (a, b in p/q form)."""
    if x.b == 0:
        return format_rational(x.a)
    bpart = format_rational(abs(x.b)) + " sqrt2"
    if x.a == 0:
        return ("-" if x.b < 0 else "") + bpart
    return format_rational(x.a) + (" - " if x.b < 0 else " + ") + bpart


_TERM = re.compile(r"([+-]?)((?:\d+(?:/\d+)?)?)\*?(sqrt2)?")


def parse_q2(text: str) -> Q2:
    """Parse ``p/q + r/s sqrt2`` (whitespace-insensitive, ``*sqrt2`` accepted)."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty Q2 literal")
    a = Fraction(0)
    b = Fraction(0)
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"bad Q2 literal {text!r}")
        sgn, num, rad = m.groups()
        if not first and not sgn:
            raise ValueError(f"bad Q2 literal {text!r}")
        if not num and not rad:
            raise ValueError(f"bad Q2 literal {text!r}")
        val = Fraction(num) if num else Fraction(1)
        if sgn == "-":
            val = -val
        if rad:
            b += val
        else:
            a += val
        pos = m.end()
        first = False
    return Q2(a, b)


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    x = parse_q2(str(text))
    if x.b != 0:
        raise ValueError(f"expected a rational, got {text!r}")
    return x.a
