"""Exact dyadic rationals and closed intervals with dyadic endpoints.

Everything certified in this package bottoms out here: endpoints are exact
binary rationals, so ring operations never round.  The only irrational
quantity we need, 2**(-j/2) for odd j, is produced as an enclosure.
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction
from math import isqrt
from numbers import Rational
from typing import Union

__all__ = [
    "Dyadic",
    "Enclosure",
    "Order",
    "arith",
    "pow2_half",
    "separate",
    "parse_dyadic",
    "precision_bits",
]

Number = Union["Dyadic", int, Fraction]


class Dyadic:
    """The value ``mantissa * 2**exponent`` in canonical form.

    The mantissa is odd unless the value is zero, in which case the exponent
    is zero as well, so equal values share one representation.
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            if tz:
                mantissa >>= tz
                exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    def __reduce__(self):
        return (Dyadic, (self.mantissa, self.exponent))

    # -- conversions -------------------------------------------------------

    @classmethod
    def coerce(cls, value: Number) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Rational):
            num, den = value.numerator, value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(num, -(den.bit_length() - 1))
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def from_scaled(cls, value: int, scale: int) -> "Dyadic":
        """``value * 2**-scale``."""
        return cls(value, -scale)

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def scaled_floor(self, scale: int) -> int:
        """``floor(self * 2**scale)``."""
        shift = self.exponent + scale
        if shift >= 0:
            return self.mantissa << shift
        return self.mantissa >> -shift

    def scaled_ceil(self, scale: int) -> int:
        shift = self.exponent + scale
        if shift >= 0:
            return self.mantissa << shift
        return -((-self.mantissa) >> -shift)

    def __float__(self) -> float:
        return float(self.to_fraction())

    @property
    def level(self) -> int:
        """Smallest n >= 0 with ``self * 2**n`` an integer."""
        return max(0, -self.exponent)

    # -- arithmetic --------------------------------------------------------

    def _align(self, other: "Dyadic"):
        e = min(self.exponent, other.exponent)
        return (self.mantissa << (self.exponent - e),
                other.mantissa << (other.exponent - e), e)

    def __add__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        return Dyadic.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.exponent)

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k``."""
        return Dyadic(self.mantissa, self.exponent + k)

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    # -- comparison --------------------------------------------------------

    def _cmp(self, other) -> int:
        if isinstance(other, Dyadic):
            a, b, _ = self._align(other)
            return (a > b) - (a < b)
        if isinstance(other, (int, Fraction)):
            f = self.to_fraction()
            return (f > other) - (f < other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    # -- text --------------------------------------------------------------

    def __str__(self):
        return f"{self.mantissa}*2^{self.exponent}"

    def __repr__(self):
        return f"Dyadic({self.mantissa}, {self.exponent})"

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Inverse of ``str``: ``"m*2^e"`` with decimal integers."""
        m = re.fullmatch(r"\s*([+-]?\d+)\s*\*\s*2\^\s*([+-]?\d+)\s*", text)
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``"m*2^e"``, ``"2^-k"``, ``"-3/8"``, ``"0.125"`` or ``"5"`` exactly.

    Floats are never involved; anything whose value is not a binary
    rational is rejected.
    """
    text = text.strip()
    m = re.fullmatch(r"([+-]?)2\^([+-]?\d+)", text)
    if m:
        return Dyadic(-1 if m.group(1) == "-" else 1, int(m.group(2)))
    if "*" in text:
        return Dyadic.parse(text)
    try:
        value = Fraction(text)
    except ValueError:
        raise ValueError(f"not a dyadic rational: {text!r}") from None
    return Dyadic.coerce(value)


def precision_bits(eps: Number) -> int:
    """Smallest p with ``2**-p <= eps`` (eps > 0)."""
    eps = Dyadic.coerce(eps)
    if eps.mantissa <= 0:
        raise ValueError("eps must be positive")
    return -eps.exponent - (eps.mantissa.bit_length() - 1)


class Order(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    OVERLAP = "overlap"


class Enclosure:
    """Closed interval ``[lo, hi]`` with dyadic endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Number, hi: Number | None = None):
        lo = Dyadic.coerce(lo)
        hi = lo if hi is None else Dyadic.coerce(hi)
        if hi < lo:
            raise ValueError(f"empty enclosure [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Enclosure is immutable")

    def __reduce__(self):
        return (Enclosure, (self.lo, self.hi))

    @classmethod
    def from_scaled(cls, lo: int, hi: int, scale: int) -> "Enclosure":
        return cls(Dyadic(lo, -scale), Dyadic(hi, -scale))

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Dyadic:
        return (self.lo + self.hi).shift(-1)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, Dyadic):
            return self.lo <= x <= self.hi
        x = Fraction(x)
        return self.lo.to_fraction() <= x <= self.hi.to_fraction()

    __contains__ = contains

    def overlaps(self, other: "Enclosure") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def intersect(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def inflate(self, r: Number) -> "Enclosure":
        r = Dyadic.coerce(r)
        return Enclosure(self.lo - r, self.hi + r)

    def abs_max(self) -> Dyadic:
        return max(abs(self.lo), abs(self.hi))

    def __add__(self, other):
        other = _as_enclosure(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_enclosure(other)
        return Enclosure(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _as_enclosure(other) - self

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _as_enclosure(other)
        products = [self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi]
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def shift(self, k: int) -> "Enclosure":
        return Enclosure(self.lo.shift(k), self.hi.shift(k))

    def __eq__(self, other):
        if not isinstance(other, Enclosure):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Enclosure({self.lo}, {self.hi})"

    def as_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi)}


def _as_enclosure(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure(x)


def arith(a: Enclosure, b: Enclosure | None, op: str) -> Enclosure:
    """Exact interval operation ``op`` in {"add", "sub", "mul", "neg"}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")


def separate(a: Enclosure, b: Enclosure) -> Order:
    if a.hi < b.lo:
        return Order.LESS
    if a.lo > b.hi:
        return Order.GREATER
    return Order.OVERLAP


def sqrt2_scaled(q: int) -> tuple[int, int]:
    """Integers ``(lo, hi)`` with ``lo * 2**-q < sqrt(2) < hi * 2**-q``, hi = lo + 1."""
    lo = isqrt(2 << (2 * q))
    return lo, lo + 1


def pow2_half(j: int, p: int) -> Enclosure:
    """Enclosure of ``2**(-j/2)`` of width at most ``2**-p``; exact for even j."""
    if j < 0 or p < 1:
        raise ValueError("need j >= 0 and p >= 1")
    if j % 2 == 0:
        return Enclosure(Dyadic(1, -(j // 2)))
    # 2**(-j/2) = sqrt(2) * 2**(-(j+1)/2)
    k = (j + 1) // 2
    q = max(p - k, 1)
    lo, hi = sqrt2_scaled(q)
    return Enclosure(Dyadic(lo, -q - k), Dyadic(hi, -q - k))
