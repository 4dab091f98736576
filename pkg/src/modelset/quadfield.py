"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

Values are ``a + b*sqrt(D)`` with ``a``, ``b`` rational
(:class:`fractions.Fraction`, always reduced, arbitrary precision) and
``D`` a fixed square-free positive integer.  All predicates (sign,
comparison, equality, membership) are decided by exact rational
case analysis; floats exist only through :meth:`QuadReal.to_float`,
intended for plotting and prescreening.

The field parameter ``D`` is a per-value tag, but mixing values with
different ``D`` in one arithmetic expression is an error: every
computation in this library fixes one field up front.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering

from .errors import ConfigError

__all__ = [
    "QuadReal",
    "qr",
    "sqrt_of",
    "golden",
    "parse_quadreal",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational value: {x!r}")


@total_ordering
class QuadReal:
    """Immutable element a + b*sqrt(D) of the field Q(sqrt(D))."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D=5):
        object.__setattr__(self, "a", _as_fraction(a))
        object.__setattr__(self, "b", _as_fraction(b))
        object.__setattr__(self, "D", int(D))
        if self.D <= 0:
            raise ConfigError(f"field parameter must be positive, got {self.D}")

    def __setattr__(self, *_):
        raise AttributeError("QuadReal is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def rational(cls, q, D=5) -> "QuadReal":
        return cls(q, 0, D)

    def _lift(self, other) -> "QuadReal":
        if isinstance(other, QuadReal):
            if other.D != self.D:
                raise ConfigError(
                    f"mixed fields: sqrt({self.D}) vs sqrt({other.D})"
                )
            return other
        return QuadReal(_as_fraction(other), 0, self.D)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        return QuadReal(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadReal(-self.a, -self.b, self.D)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        # (a + b s)(c + d s) = ac + bd D + (ad + bc) s
        return QuadReal(
            self.a * o.a + self.b * o.b * self.D,
            self.a * o.b + self.b * o.a,
            self.D,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        # multiply by the conjugate; norm = c^2 - d^2 D is rational
        norm = o.a * o.a - o.b * o.b * self.D
        if norm == 0:
            if o.a == 0 and o.b == 0:
                raise ZeroDivisionError("division by zero")
            # norm zero with nonzero value would make sqrt(D) rational
            raise ConfigError(f"D = {self.D} is a perfect square; not a field")
        num = self * QuadReal(o.a, -o.b, self.D)
        return QuadReal(num.a / norm, num.b / norm, self.D)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (QuadReal(1, 0, self.D) / self) ** (-k)
        out = QuadReal(1, 0, self.D)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- conjugation and sign -------------------------------------------------

    def conjugate(self) -> "QuadReal":
        """Galois conjugate: a + b*sqrt(D) -> a - b*sqrt(D)."""
        return QuadReal(self.a, -self.b, self.D)

    def sign(self) -> int:
        """Exact sign in {-1, 0, +1}, by rational case analysis.

        sqrt(D) is irrational for our (square-free, > 1) fields, so
        a + b*sqrt(D) = 0 forces a = b = 0; otherwise compare a^2
        against b^2 D on the side the signs of a and b leave open.
        """
        a, b = self.a, self.b
        if b == 0:
            return -1 if a < 0 else (0 if a == 0 else 1)
        if a == 0:
            return -1 if b < 0 else 1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: |a| vs |b| sqrt(D) decides
        lhs, rhs = a * a, b * b * self.D
        if a > 0:  # b < 0
            return 1 if lhs > rhs else (0 if lhs == rhs else -1)
        return -1 if lhs > rhs else (0 if lhs == rhs else 1)

    def is_rational(self) -> bool:
        return self.b == 0

    # -- order ----------------------------------------------------------------

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ConfigError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        return (self - self._lift(other)).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- embeddings -----------------------------------------------------------

    def to_float(self) -> float:
        """Float embedding. Plotting and prescreening only."""
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    __float__ = to_float

    def floor(self) -> int:
        """Exact floor, via a float guess corrected by exact comparisons."""
        n = math.floor(self.to_float())
        # the float guess is off by at most a few ulps worth of units
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def ceil(self) -> int:
        return -((-self).floor())

    # -- text form ------------------------------------------------------------

    def __repr__(self):
        return f"QuadReal({self})"

    def __str__(self):
        return format_quadreal(self)

    def serialize(self) -> str:
        return format_quadreal(self)


def qr(a, b=0, D=5) -> QuadReal:
    """Shorthand constructor."""
    return QuadReal(a, b, D)


def sqrt_of(D: int) -> QuadReal:
    return QuadReal(0, 1, D)


def golden() -> QuadReal:
    """The golden ratio (1 + sqrt(5))/2 in Q(sqrt(5))."""
    return QuadReal(Fraction(1, 2), Fraction(1, 2), 5)


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_quadreal(x: QuadReal) -> str:
    """Canonical text form "p/q + r/s*sqrt(D)" (integer shorthand kept)."""
    if x.b == 0:
        return _fmt_fraction(x.a)
    root = f"{_fmt_fraction(abs(x.b))}*sqrt({x.D})"
    if x.a == 0:
        return root if x.b > 0 else f"-{root}"
    op = "+" if x.b > 0 else "-"
    return f"{_fmt_fraction(x.a)} {op} {root}"


_TERM = re.compile(
    r"""\s*
    (?P<sign>[+-])?\s*
    (?:
        (?P<coef>\d+(?:/\d+)?)\s*\*?\s*sqrt\(\s*(?P<d1>\d+)\s*\)
      | sqrt\(\s*(?P<d2>\d+)\s*\)
      | (?P<rat>\d+(?:/\d+)?)
    )
    \s*""",
    re.VERBOSE,
)


def parse_quadreal(text: str, D: int = 5) -> QuadReal:
    """Parse "p/q + r/s*sqrt(D)"; integer shorthand and sqrt(D) alone accepted.

    The declared field D must match every sqrt() that appears.
    """
    if isinstance(text, (int, Fraction)):
        return QuadReal(text, 0, D)
    s = str(text)
    pos = 0
    a = Fraction(0)
    b = Fraction(0)
    saw_term = False
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m:
            break
        sgn = -1 if m.group("sign") == "-" else 1
        if m.group("sign") is None and saw_term:
            break  # two terms need an explicit separator
        try:
            if m.group("rat") is not None:
                a += sgn * Fraction(m.group("rat"))
            else:
                d = int(m.group("d1") or m.group("d2"))
                if d != D:
                    raise ConfigError(
                        f"expected sqrt({D}), found sqrt({d}) in {text!r}"
                    )
                coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
                b += sgn * coef
        except ZeroDivisionError:
            raise ConfigError(f"zero denominator in {text!r}") from None
        saw_term = True
        pos = m.end()
    if not saw_term or pos != len(s):
        raise ConfigError(f"cannot parse field element from {text!r}")
    return QuadReal(a, b, D)
