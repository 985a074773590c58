"""Walk codes of C_n approximants and their sup-norm distance to the path.

For n = 2**j the approximant x_n is linear on each [(i-1)/n, i/n] with slope
+sqrt(n) when a_i = 1 and -sqrt(n) when a_i = 0, and vanishes at 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import Dyadic, Enclosure, pow2_half, precision_bits
from .levypath import PathEvaluator, cbrt_upper
from .oracle import Budget, Verdict, compare_at_points

__all__ = ["WalkCode", "code_of_path", "walk_value", "sup_distance"]


@dataclass(frozen=True)
class WalkCode:
    n: int
    bits: str

    def __post_init__(self):
        if self.n < 1 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two")
        if len(self.bits) != self.n or set(self.bits) - {"0", "1"}:
            raise ValueError("bits must be an ASCII 0/1 word of length n")

    @property
    def j(self) -> int:
        return self.n.bit_length() - 1

    def complement(self) -> "WalkCode":
        return WalkCode(self.n, self.bits.translate(str.maketrans("01", "10")))

    def partial_sum(self, i: int) -> int:
        """S_i = sum of +-1 steps over the first i letters."""
        ones = self.bits.count("1", 0, i)
        return 2 * ones - i

    def __str__(self):
        return self.bits


def code_of_path(ev: PathEvaluator, j: int, b: Budget) -> WalkCode | Verdict:
    """a_i = 1 iff x(i/n) > x((i-1)/n), each certified by a point comparison."""
    if j < 0:
        raise ValueError("j must be >= 0")
    n = 1 << j
    out = []
    for i in range(1, n + 1):
        v = compare_at_points(ev, Dyadic(i - 1, -j), Dyadic(i, -j), b)
        if v.exhausted:
            return v
        out.append("1" if v.kind == "less" else "0")
    return WalkCode(n, "".join(out))


def _scaled_walk(code: WalkCode, t: Fraction) -> Fraction:
    """sqrt(n) * x_n(t), an exact rational."""
    n = code.n
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    s = t * n
    i = min(int(s), n - 1)  # segment [i/n, (i+1)/n]
    step = 1 if code.bits[i] == "1" else -1
    return code.partial_sum(i) + step * (s - i)


def walk_value(code: WalkCode, t, p: int) -> Enclosure:
    """Enclosure of x_n(t) of width <= 2**-p; exact for even j at dyadic t."""
    t = Fraction(t.to_fraction() if isinstance(t, Dyadic) else t)
    w = _scaled_walk(code, t)
    if w == 0:
        return Enclosure(0)
    mag = max(abs(w).numerator.bit_length() - abs(w).denominator.bit_length() + 1, 0)
    r = pow2_half(code.j, p + mag + 2)  # 1/sqrt(n)
    if w.denominator & (w.denominator - 1) == 0:
        return r * Enclosure(Dyadic.coerce(w))
    q = p + 2
    w_enc = Enclosure(Dyadic((w.numerator << q) // w.denominator, -q),
                      Dyadic(-((-w.numerator << q) // w.denominator), -q))
    return r * w_enc


def _abs_enclosure(e: Enclosure) -> Enclosure:
    if e.lo >= 0:
        return e
    if e.hi <= 0:
        return -e
    return Enclosure(Dyadic(0), max(-e.lo, e.hi))


def sup_distance(ev: PathEvaluator, code: WalkCode, eps, modulus: str = "schauder") -> Enclosure:
    """Enclosure of sup |x - x_n| from the grid 8 times finer than the walk.

    The lower end is the largest certified grid lower bound.  Between grid
    points x_n is linear, so x - x_n is a chord plus the Schauder tents of
    levels >= j + 3 (``"schauder"``, bounded by the cell slack) or is bounded
    by the Hoelder moduli of both functions (``"holder"``).
    """
    eps = Dyadic.coerce(eps)
    L = code.j + 3
    p = precision_bits(eps) + 1
    lo = Dyadic(0)
    hi = Dyadic(0)
    for i in range((1 << L) + 1):
        t = Dyadic(i, -L)
        d = _abs_enclosure(ev.value_at_dyadic(t, eps.shift(-1)) - walk_value(code, t, p))
        lo = max(lo, d.lo)
        hi = max(hi, d.hi)
    if modulus == "schauder":
        pad = ev.slack(L)
    elif modulus == "holder":
        h = Dyadic(1, -L)
        # |x(s) - x(t)| <= H h**(1/3); the walk moves at most sqrt(n) h
        pad = ev.holder().hi * cbrt_upper(h) + pow2_half(code.j, 30).hi.shift(code.j) * h
    else:
        raise ValueError(f"unknown modulus {modulus!r}")
    return Enclosure(lo, hi + pad)
