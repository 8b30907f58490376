"""
Exact arithmetic in Q(sqrt 5) on the basis {1, phi}, phi = (sqrt 5 - 1)/2.

An element a + b*phi is stored as two Fractions.  The relation phi**2 = 1 - phi
closes multiplication; the sign is decided exactly by comparing squares, so
every comparison is exact.  Floats mixed into arithmetic demote the result to
float, while comparisons against floats stay exact (the float is read as the
rational it represents).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

__all__ = [
    "PHI",
    "PHI_FLOAT",
    "GoldenRational",
    "gr_sign",
    "gr_floor",
    "gr_to_float",
    "parse_golden",
    "golden",
    "FLOOR_MAX_ROUNDS",
]

PHI_FLOAT = (math.sqrt(5.0) - 1.0) / 2.0

# the enclosure of sqrt(5) starts at 2**-64 and squares its precision each round
FLOOR_MAX_ROUNDS = 40


class FloorRefinementError(ArithmeticError):
    pass


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return None


@total_ordering
class GoldenRational:
    """
    The number a + b*phi with a, b rational.

    >>> x = GoldenRational(0, 1)
    >>> x * x == 1 - x
    True
    >>> str(GoldenRational(Fraction(1, 2), -3))
    '1/2 - 3*phi'
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        if isinstance(a, GoldenRational):
            if b:
                raise TypeError("cannot combine a GoldenRational with a phi coefficient")
            self.a, self.b = a.a, a.b
            return
        fa, fb = _as_fraction(a), _as_fraction(b)
        if fa is None or fb is None:
            raise TypeError("coefficients must be rational, got %r, %r" % (a, b))
        self.a = fa
        self.b = fb

    @classmethod
    def _make(cls, a: Fraction, b: Fraction) -> GoldenRational:
        obj = object.__new__(cls)
        obj.a = a
        obj.b = b
        return obj

    @classmethod
    def coerce(cls, x) -> GoldenRational:
        if isinstance(x, GoldenRational):
            return x
        f = _as_fraction(x)
        if f is None:
            raise TypeError("cannot convert %r exactly" % (x,))
        return cls._make(f, Fraction(0))

    def conjugate(self) -> GoldenRational:
        # phi -> -1 - phi
        return GoldenRational._make(self.a - self.b, -self.b)

    def norm(self) -> Fraction:
        a, b = self.a, self.b
        return a * a - a * b - b * b

    def is_rational(self) -> bool:
        return self.b == 0

    # arithmetic

    def __add__(self, other):
        if isinstance(other, GoldenRational):
            return GoldenRational._make(self.a + other.a, self.b + other.b)
        if isinstance(other, float):
            return float(self) + other
        f = _as_fraction(other)
        if f is None:
            return NotImplemented
        return GoldenRational._make(self.a + f, self.b)

    __radd__ = __add__

    def __neg__(self):
        return GoldenRational._make(-self.a, -self.b)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if gr_sign(self) < 0 else self

    def __sub__(self, other):
        if isinstance(other, GoldenRational):
            return GoldenRational._make(self.a - other.a, self.b - other.b)
        if isinstance(other, float):
            return float(self) - other
        f = _as_fraction(other)
        if f is None:
            return NotImplemented
        return GoldenRational._make(self.a - f, self.b)

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        f = _as_fraction(other)
        if f is None:
            return NotImplemented
        return GoldenRational._make(f - self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, GoldenRational):
            a, b, c, d = self.a, self.b, other.a, other.b
            bd = b * d
            return GoldenRational._make(a * c + bd, a * d + b * c - bd)
        if isinstance(other, float):
            return float(self) * other
        f = _as_fraction(other)
        if f is None:
            return NotImplemented
        return GoldenRational._make(self.a * f, self.b * f)

    __rmul__ = __mul__

    def inverse(self) -> GoldenRational:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GoldenRational division by zero")
        return GoldenRational._make((self.a - self.b) / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, GoldenRational):
            return self * other.inverse()
        if isinstance(other, float):
            return float(self) / other
        f = _as_fraction(other)
        if f is None:
            return NotImplemented
        if f == 0:
            raise ZeroDivisionError("GoldenRational division by zero")
        return GoldenRational._make(self.a / f, self.b / f)

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        f = _as_fraction(other)
        if f is None:
            return NotImplemented
        return self.inverse() * f

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = GoldenRational._make(Fraction(1), Fraction(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison

    def _diff_sign(self, other) -> int | None:
        if isinstance(other, GoldenRational):
            return _sign_ab(self.a - other.a, self.b - other.b)
        if isinstance(other, float):
            if math.isnan(other):
                return None
            if math.isinf(other):
                return -1 if other > 0 else 1
            other = Fraction(other)
        f = _as_fraction(other)
        if f is None:
            return None
        return _sign_ab(self.a - f, self.b)

    def __eq__(self, other):
        s = self._diff_sign(other)
        if s is None:
            return NotImplemented
        return s == 0

    def __lt__(self, other):
        s = self._diff_sign(other)
        if s is None:
            return NotImplemented
        return s < 0

    def __le__(self, other):
        s = self._diff_sign(other)
        if s is None:
            return NotImplemented
        return s <= 0

    def __gt__(self, other):
        s = self._diff_sign(other)
        if s is None:
            return NotImplemented
        return s > 0

    def __ge__(self, other):
        s = self._diff_sign(other)
        if s is None:
            return NotImplemented
        return s >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # conversion

    def __float__(self):
        return gr_to_float(self)

    def __floor__(self):
        return gr_floor(self)

    def __ceil__(self):
        return -gr_floor(-self)

    def __str__(self):
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        bs = "phi" if abs(b) == 1 else "%s*phi" % abs(b)
        if a == 0:
            return ("-" if b < 0 else "") + bs
        return "%s %s %s" % (a, "-" if b < 0 else "+", bs)

    def __repr__(self):
        return "GoldenRational('%s')" % self

    def __reduce__(self):
        return (GoldenRational, (self.a, self.b))


PHI = GoldenRational(0, 1)


def _sign_ab(a: Fraction, b: Fraction) -> int:
    # 2(a + b*phi) = (2a - b) + b*sqrt(5); clear denominators and compare squares
    if b == 0:
        return (a > 0) - (a < 0)
    an, ad = a.numerator, a.denominator
    bn, bd = b.numerator, b.denominator
    u = 2 * an * bd - bn * ad      # (2a - b) * ad * bd
    v = bn * ad                    # b * ad * bd
    su = (u > 0) - (u < 0)
    sv = (v > 0) - (v < 0)
    if su == 0:
        return sv
    if su == sv:
        return su
    d = u * u - 5 * v * v
    return su if d > 0 else sv


def gr_sign(x) -> int:
    """Exact sign of x, one of -1, 0, 1."""
    if isinstance(x, GoldenRational):
        return _sign_ab(x.a, x.b)
    return (x > 0) - (x < 0)


def _sqrt5_bounds(bits: int) -> tuple[Fraction, Fraction]:
    s = math.isqrt(5 << (2 * bits))
    return Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits)


def _enclose(x: GoldenRational, bits: int) -> tuple[Fraction, Fraction]:
    lo5, hi5 = _sqrt5_bounds(bits)
    # x = a + b*(s - 1)/2, monotone in s with the sign of b
    p = x.a + x.b * (lo5 - 1) / 2
    q = x.a + x.b * (hi5 - 1) / 2
    return (p, q) if p <= q else (q, p)


def gr_floor(x) -> int:
    """
    Floor of x by refining a rational enclosure of sqrt(5).

    A non-rational x is never an integer, so the refinement terminates; the
    round count is capped anyway and exceeding it raises.
    """
    if not isinstance(x, GoldenRational):
        return math.floor(x)
    if x.b == 0:
        return math.floor(x.a)
    bits = 64
    for _ in range(FLOOR_MAX_ROUNDS):
        lo, hi = _enclose(x, bits)
        fl, fh = math.floor(lo), math.floor(hi)
        if fl == fh:
            return fl
        bits *= 2
    raise FloorRefinementError("floor of %s not resolved" % x)


def gr_to_float(x) -> float:
    """Correctly rounded (half-even) double nearest to x."""
    if not isinstance(x, GoldenRational):
        return float(x)
    if x.b == 0:
        return float(x.a)
    bits = 80
    for _ in range(FLOOR_MAX_ROUNDS):
        lo, hi = _enclose(x, bits)
        # Fraction.__float__ is a correctly rounded integer division
        fl, fh = float(lo), float(hi)
        if fl == fh:
            return fl
        bits *= 2
    raise FloorRefinementError("float of %s not resolved" % x)


_TERM = re.compile(
    r"\s*([+-])?\s*"
    r"(?:(\d+(?:/\d+)?)\s*(\*\s*phi)?|(phi))"
    r"\s*",
)


def parse_golden(text: str) -> GoldenRational:
    """
    Parse forms such as '1/2 + 3/4*phi', '1 - phi', '-phi', '2/5'.

    >>> parse_golden('1 - phi') == 1 - PHI
    True
    """
    s = text.strip()
    if not s:
        raise ValueError("empty golden literal")
    a = Fraction(0)
    b = Fraction(0)
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError("cannot parse golden literal %r" % text)
        sign, num, times_phi, bare_phi = m.groups()
        if sign is None and not first:
            raise ValueError("missing operator in golden literal %r" % text)
        coef = Fraction(1) if bare_phi else Fraction(num)
        if sign == "-":
            coef = -coef
        if bare_phi or times_phi:
            b += coef
        else:
            a += coef
        pos = m.end()
        first = False
    return GoldenRational(a, b)


def golden(x) -> GoldenRational:
    """Coerce an int, Fraction, literal string or GoldenRational."""
    if isinstance(x, str):
        return parse_golden(x)
    return GoldenRational.coerce(x)
